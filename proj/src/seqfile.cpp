#include "citematch/seqfile.hpp"

namespace citematch {

void put_u32be(std::string& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((v >> shift) & 0xFF));
}

void put_u64be(std::string& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<char>((v >> shift) & 0xFF));
}

std::uint32_t get_u32be(const unsigned char* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         std::uint32_t{p[3]};
}

std::uint64_t get_u64be(const unsigned char* p) {
  return (std::uint64_t{get_u32be(p)} << 32) | get_u32be(p + 4);
}

SeqWriter::SeqWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot create " + path.string());
  out_.write(seqfile::kMagic.data(), static_cast<std::streamsize>(seqfile::kMagic.size()));
  out_.put(static_cast<char>(seqfile::kVersion));
  offset_ = seqfile::kHeaderSize;
}

SeqWriter::~SeqWriter() {
  if (!closed_) {
    try {
      close();
    } catch (...) {
    }
  }
}

std::uint64_t SeqWriter::append(std::string_view key, std::string_view value) {
  if (closed_) throw UsageError("append to a closed SeqFile");
  if (key.size() > seqfile::kMaxLength || value.size() > seqfile::kMaxLength) {
    throw UsageError("record too large for SeqFile");
  }
  std::string head;
  put_u32be(head, static_cast<std::uint32_t>(key.size()));
  out_.write(head.data(), 4);
  out_.write(key.data(), static_cast<std::streamsize>(key.size()));
  head.clear();
  put_u32be(head, static_cast<std::uint32_t>(value.size()));
  out_.write(head.data(), 4);
  out_.write(value.data(), static_cast<std::streamsize>(value.size()));
  if (!out_) throw IoError("write failed: " + path_.string());
  const std::uint64_t start = offset_;
  offset_ += 8 + key.size() + value.size();
  ++count_;
  return start;
}

std::uint64_t SeqWriter::close() {
  if (closed_) return count_;
  closed_ = true;
  std::string trailer;
  put_u64be(trailer, ~std::uint64_t{0});
  put_u64be(trailer, count_);
  out_.write(trailer.data(), static_cast<std::streamsize>(trailer.size()));
  out_.close();
  if (!out_) throw IoError("write failed: " + path_.string());
  return count_;
}

SeqReader::SeqReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw IoError("cannot open " + path.string());
  char head[seqfile::kHeaderSize];
  in_.read(head, sizeof head);
  if (in_.gcount() != static_cast<std::streamsize>(sizeof head) ||
      std::string_view(head, 4) != seqfile::kMagic ||
      static_cast<std::uint8_t>(head[4]) != seqfile::kVersion) {
    throw SeqFileError(SeqFileError::Kind::BadMagic, 0, path.string() + ": not a SeqFile (bad magic)");
  }
  offset_ = seqfile::kHeaderSize;
}

SeqReader::SeqReader(const std::filesystem::path& path, std::uint64_t offset,
                     std::optional<std::uint64_t> limit)
    : SeqReader(path) {
  if (offset != seqfile::kHeaderSize) {
    in_.seekg(static_cast<std::streamoff>(offset));
    from_start_ = false;
  }
  offset_ = offset;
  limit_ = limit;
}

void SeqReader::read_exact(char* dst, std::size_t n, std::uint64_t record_start) {
  in_.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in_.gcount()) != n) {
    throw SeqFileError(SeqFileError::Kind::Truncated, record_start,
                       path_.string() + ": truncated record at byte offset " +
                           std::to_string(record_start));
  }
}

bool SeqReader::next(KVRecord& out) {
  if (done_) return false;
  if (limit_ && count_ == *limit_) {
    done_ = true;
    return false;
  }
  const std::uint64_t start = offset_;
  unsigned char len[4];
  read_exact(reinterpret_cast<char*>(len), 4, start);
  const std::uint32_t key_len = get_u32be(len);
  if (key_len == 0xFFFFFFFFu) {
    unsigned char rest[12];
    read_exact(reinterpret_cast<char*>(rest), 12, start);
    if (get_u32be(rest) != 0xFFFFFFFFu) {
      throw SeqFileError(SeqFileError::Kind::TrailerMismatch, start,
                         path_.string() + ": malformed trailer at byte offset " + std::to_string(start));
    }
    const std::uint64_t declared = get_u64be(rest + 4);
    if (from_start_ && declared != count_) {
      throw SeqFileError(SeqFileError::Kind::TrailerMismatch, start,
                         path_.string() + ": trailer declares " + std::to_string(declared) +
                             " records but " + std::to_string(count_) + " are present");
    }
    if (in_.peek() != std::char_traits<char>::eof()) {
      throw SeqFileError(SeqFileError::Kind::TrailerMismatch, start + 16,
                         path_.string() + ": trailing bytes after trailer");
    }
    offset_ += 16;
    done_ = true;
    return false;
  }
  out.key.resize(key_len);
  read_exact(out.key.data(), key_len, start);
  read_exact(reinterpret_cast<char*>(len), 4, start);
  const std::uint32_t value_len = get_u32be(len);
  out.value.resize(value_len);
  read_exact(out.value.data(), value_len, start);
  offset_ += 8 + std::uint64_t{key_len} + value_len;
  ++count_;
  return true;
}

std::uint64_t seq_write(const std::filesystem::path& path, std::span<const KVRecord> records) {
  SeqWriter w(path);
  for (const auto& r : records) w.append(r);
  return w.close();
}

std::vector<KVRecord> seq_read(const std::filesystem::path& path) {
  SeqReader r(path);
  std::vector<KVRecord> out;
  KVRecord rec;
  while (r.next(rec)) out.push_back(std::move(rec));
  return out;
}

std::vector<std::uint64_t> seq_record_offsets(const std::filesystem::path& path) {
  SeqReader r(path);
  std::vector<std::uint64_t> out;
  KVRecord rec;
  for (;;) {
    const auto at = r.offset();
    if (!r.next(rec)) break;
    out.push_back(at);
  }
  return out;
}

}  // namespace citematch
