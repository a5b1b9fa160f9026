#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "citematch/seqfile.hpp"

namespace citematch {

// A sorted SeqFile ("data") plus a sparse index SeqFile ("index") holding
// every K-th key with the 8-byte big-endian offset of its record.
struct MapFileStore {
  std::filesystem::path dir;
  std::uint64_t records = 0;
  std::size_t interval = 128;

  std::filesystem::path data_path() const { return dir / "data"; }
  std::filesystem::path index_path() const { return dir / "index"; }
};

struct MapFileOptions {
  std::size_t interval = 128;
  std::filesystem::path scratch;  // defaults to <out>/_sort
  std::size_t memory_budget = 64u << 20;
};

// Stable external sort of `unsorted` by key bytes into a MapFile at `out_dir`.
MapFileStore mapfile_build(const std::filesystem::path& unsorted,
                           const std::filesystem::path& out_dir,
                           const MapFileOptions& options = {});

// Read-only view of a MapFile. The data file is memory mapped, so one reader
// can serve concurrent scans.
class MapFileReader {
 public:
  explicit MapFileReader(const std::filesystem::path& dir);
  ~MapFileReader();
  MapFileReader(const MapFileReader&) = delete;
  MapFileReader& operator=(const MapFileReader&) = delete;

  std::uint64_t size() const { return records_; }

  // Visits records in key order starting at the first key >= `from` until
  // `visit` returns false.
  void scan_from(std::string_view from,
                 const std::function<bool(std::string_view key, std::string_view value)>& visit) const;

  // Records from the first key >= prefix while `keep(key)` holds.
  std::vector<KVRecord> seek_scan(std::string_view prefix,
                                  const std::function<bool(std::string_view key)>& keep) const;
  // Records whose key starts with `prefix`.
  std::vector<KVRecord> seek_scan(std::string_view prefix) const;

  void for_each(const std::function<void(std::string_view key, std::string_view value)>& visit) const;

 private:
  struct Record {
    std::string_view key;
    std::string_view value;
    std::uint64_t next;
  };
  Record record_at(std::uint64_t offset) const;

  const unsigned char* data_ = nullptr;
  std::size_t length_ = 0;
  std::uint64_t end_ = 0;  // start of the trailer
  std::uint64_t records_ = 0;
  std::vector<std::string> index_keys_;
  std::vector<std::uint64_t> index_offsets_;
};

}  // namespace citematch
