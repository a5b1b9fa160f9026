#include "citematch/mapfile.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>

#include "citematch/external_sort.hpp"

namespace citematch {

MapFileStore mapfile_build(const std::filesystem::path& unsorted,
                           const std::filesystem::path& out_dir, const MapFileOptions& options) {
  if (options.interval == 0) throw UsageError("MapFile index interval must be positive");
  std::filesystem::create_directories(out_dir);
  const auto scratch = options.scratch.empty() ? out_dir / "_sort" : options.scratch;

  ExternalSorter sorter(scratch, "mapfile", options.memory_budget);
  {
    SeqReader in(unsorted);
    KVRecord rec;
    while (in.next(rec)) sorter.add(std::move(rec.key), std::move(rec.value));
  }

  MapFileStore store{out_dir, 0, options.interval};
  SeqWriter data(store.data_path());
  SeqWriter index(store.index_path());
  merge_runs(sorter.finish(), [&](KVRecord&& rec) {
    const std::uint64_t offset = data.append(rec);
    if (store.records % options.interval == 0) {
      std::string value;
      put_u64be(value, offset);
      index.append(rec.key, value);
    }
    ++store.records;
  });
  data.close();
  index.close();
  if (options.scratch.empty()) std::filesystem::remove_all(scratch);
  return store;
}

MapFileReader::MapFileReader(const std::filesystem::path& dir) {
  const auto data_path = dir / "data";
  {
    // Validates the header, every record and the trailer.
    SeqReader check(data_path);
    KVRecord rec;
    while (check.next(rec)) ++records_;
  }
  const int fd = ::open(data_path.c_str(), O_RDONLY);
  if (fd < 0) throw IoError("cannot open " + data_path.string());
  struct stat st {};
  if (::fstat(fd, &st) != 0) {
    ::close(fd);
    throw IoError("cannot stat " + data_path.string());
  }
  length_ = static_cast<std::size_t>(st.st_size);
  void* mapped = ::mmap(nullptr, length_, PROT_READ, MAP_PRIVATE, fd, 0);
  ::close(fd);
  if (mapped == MAP_FAILED) throw IoError("cannot map " + data_path.string());
  data_ = static_cast<const unsigned char*>(mapped);
  end_ = length_ - seqfile::kTrailerSize;

  for (const auto& entry : seq_read(dir / "index")) {
    if (entry.value.size() != 8) {
      throw DataError(dir.string() + ": malformed MapFile index entry");
    }
    const auto offset = get_u64be(reinterpret_cast<const unsigned char*>(entry.value.data()));
    if (offset < seqfile::kHeaderSize || offset >= end_ || record_at(offset).key != entry.key) {
      throw DataError(dir.string() + ": MapFile index entry does not match the data file");
    }
    index_keys_.push_back(entry.key);
    index_offsets_.push_back(offset);
  }
}

MapFileReader::~MapFileReader() {
  if (data_) ::munmap(const_cast<unsigned char*>(data_), length_);
}

MapFileReader::Record MapFileReader::record_at(std::uint64_t offset) const {
  const unsigned char* p = data_ + offset;
  const std::uint32_t key_len = get_u32be(p);
  const unsigned char* key = p + 4;
  const std::uint32_t value_len = get_u32be(key + key_len);
  const unsigned char* value = key + key_len + 4;
  return {std::string_view(reinterpret_cast<const char*>(key), key_len),
          std::string_view(reinterpret_cast<const char*>(value), value_len),
          offset + 8 + key_len + value_len};
}

void MapFileReader::scan_from(
    std::string_view from,
    const std::function<bool(std::string_view key, std::string_view value)>& visit) const {
  // Last sampled key strictly below `from`; equal keys may precede a sample.
  auto it = std::lower_bound(index_keys_.begin(), index_keys_.end(), from,
                             [](const std::string& k, std::string_view f) { return k < f; });
  std::uint64_t offset = seqfile::kHeaderSize;
  if (it != index_keys_.begin()) offset = index_offsets_[static_cast<std::size_t>(it - index_keys_.begin()) - 1];
  while (offset < end_) {
    const auto rec = record_at(offset);
    offset = rec.next;
    if (rec.key < from) continue;
    if (!visit(rec.key, rec.value)) return;
  }
}

std::vector<KVRecord> MapFileReader::seek_scan(
    std::string_view prefix, const std::function<bool(std::string_view key)>& keep) const {
  std::vector<KVRecord> out;
  scan_from(prefix, [&](std::string_view key, std::string_view value) {
    if (!keep(key)) return false;
    out.push_back({std::string(key), std::string(value)});
    return true;
  });
  return out;
}

std::vector<KVRecord> MapFileReader::seek_scan(std::string_view prefix) const {
  return seek_scan(prefix, [prefix](std::string_view key) { return key.starts_with(prefix); });
}

void MapFileReader::for_each(
    const std::function<void(std::string_view key, std::string_view value)>& visit) const {
  for (std::uint64_t offset = seqfile::kHeaderSize; offset < end_;) {
    const auto rec = record_at(offset);
    visit(rec.key, rec.value);
    offset = rec.next;
  }
}

}  // namespace citematch
