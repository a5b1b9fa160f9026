#pragma once

#include <stdexcept>
#include <string>

namespace citematch {

// Base of every error thrown by the library. The category drives the CLI
// exit code.
class Error : public std::runtime_error {
 public:
  enum class Category { Usage, Data, Io };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(Category::Usage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(Category::Data, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(Category::Io, what) {}
};

}  // namespace citematch
