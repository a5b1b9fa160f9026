#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citematch/error.hpp"

namespace citematch {

struct KVRecord {
  std::string key;
  std::string value;

  bool operator==(const KVRecord&) const = default;
};

// Binary key-value record file:
//   "CMSQ" 0x01
//   { u32be key length, key, u32be value length, value }*
//   0xFFFFFFFFFFFFFFFF, u64be record count
namespace seqfile {
inline constexpr std::string_view kMagic = "CMSQ";
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::uint64_t kHeaderSize = 5;
inline constexpr std::uint64_t kTrailerSize = 16;
inline constexpr std::uint32_t kMaxLength = 0xFFFFFFFEu;
}  // namespace seqfile

class SeqFileError : public DataError {
 public:
  enum class Kind { BadMagic, Truncated, TrailerMismatch };

  SeqFileError(Kind kind, std::uint64_t offset, const std::string& what)
      : DataError(what), kind_(kind), offset_(offset) {}

  Kind kind() const noexcept { return kind_; }
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::uint64_t offset_;
};

class SeqWriter {
 public:
  explicit SeqWriter(const std::filesystem::path& path);
  SeqWriter(const SeqWriter&) = delete;
  SeqWriter& operator=(const SeqWriter&) = delete;
  ~SeqWriter();

  // Returns the byte offset at which the record starts.
  std::uint64_t append(std::string_view key, std::string_view value);
  std::uint64_t append(const KVRecord& r) { return append(r.key, r.value); }
  // Writes the trailer; returns the number of records.
  std::uint64_t close();

  std::uint64_t count() const { return count_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::uint64_t offset_ = 0;
  std::uint64_t count_ = 0;
  bool closed_ = false;
};

class SeqReader {
 public:
  explicit SeqReader(const std::filesystem::path& path);
  // Reads at most `limit` records starting at the record at byte `offset`.
  // The trailer is only validated when it is reached.
  SeqReader(const std::filesystem::path& path, std::uint64_t offset,
            std::optional<std::uint64_t> limit);

  // False once the trailer has been read and validated (or the limit hit).
  bool next(KVRecord& out);
  // Byte offset of the next record.
  std::uint64_t offset() const { return offset_; }

 private:
  void read_exact(char* dst, std::size_t n, std::uint64_t record_start);

  std::filesystem::path path_;
  std::ifstream in_;
  std::uint64_t offset_ = 0;
  std::uint64_t count_ = 0;
  bool from_start_ = true;
  std::optional<std::uint64_t> limit_;
  bool done_ = false;
};

std::uint64_t seq_write(const std::filesystem::path& path, std::span<const KVRecord> records);
std::vector<KVRecord> seq_read(const std::filesystem::path& path);
// Start offsets of every record, validating the whole file.
std::vector<std::uint64_t> seq_record_offsets(const std::filesystem::path& path);

void put_u32be(std::string& out, std::uint32_t v);
void put_u64be(std::string& out, std::uint64_t v);
std::uint32_t get_u32be(const unsigned char* p);
std::uint64_t get_u64be(const unsigned char* p);

}  // namespace citematch
