#include "citematch/external_sort.hpp"

#include <algorithm>
#include <queue>

namespace citematch {

namespace {

constexpr std::size_t kRecordOverhead = 64;

class RunCursor {
 public:
  explicit RunCursor(SortedRun run) : run_(std::move(run)) {
    if (!run_.file.empty()) reader_ = std::make_unique<SeqReader>(run_.file);
    advance();
  }

  bool valid() const { return valid_; }
  KVRecord& current() { return current_; }

  void advance() {
    if (reader_) {
      valid_ = reader_->next(current_);
    } else if (pos_ < run_.records.size()) {
      current_ = std::move(run_.records[pos_++]);
      valid_ = true;
    } else {
      valid_ = false;
    }
  }

 private:
  SortedRun run_;
  std::unique_ptr<SeqReader> reader_;
  std::size_t pos_ = 0;
  KVRecord current_;
  bool valid_ = false;
};

}  // namespace

ExternalSorter::ExternalSorter(std::filesystem::path scratch_dir, std::string run_prefix,
                               std::size_t memory_budget)
    : scratch_(std::move(scratch_dir)), prefix_(std::move(run_prefix)),
      budget_(std::max<std::size_t>(memory_budget, 1)) {}

void ExternalSorter::add(std::string key, std::string value) {
  used_ += key.size() + value.size() + kRecordOverhead;
  buffer_.push_back({std::move(key), std::move(value)});
  if (used_ >= budget_) spill();
}

void ExternalSorter::spill() {
  if (buffer_.empty()) return;
  std::stable_sort(buffer_.begin(), buffer_.end(),
                   [](const KVRecord& a, const KVRecord& b) { return a.key < b.key; });
  std::filesystem::create_directories(scratch_);
  SortedRun run;
  run.file = scratch_ / (prefix_ + "-run" + std::to_string(spills_++) + ".seq");
  seq_write(run.file, buffer_);
  runs_.push_back(std::move(run));
  buffer_.clear();
  used_ = 0;
}

std::vector<SortedRun> ExternalSorter::finish() {
  if (!buffer_.empty()) {
    std::stable_sort(buffer_.begin(), buffer_.end(),
                     [](const KVRecord& a, const KVRecord& b) { return a.key < b.key; });
    runs_.push_back({std::move(buffer_), {}});
    buffer_.clear();
    used_ = 0;
  }
  return std::exchange(runs_, {});
}

void merge_runs(std::vector<SortedRun> runs, const std::function<void(KVRecord&&)>& sink) {
  std::vector<RunCursor> cursors;
  cursors.reserve(runs.size());
  for (auto& r : runs) cursors.emplace_back(std::move(r));

  auto later = [&](std::size_t a, std::size_t b) {
    const auto& ka = cursors[a].current().key;
    const auto& kb = cursors[b].current().key;
    if (ka != kb) return ka > kb;
    return a > b;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(later)> heap(later);
  for (std::size_t i = 0; i < cursors.size(); ++i) {
    if (cursors[i].valid()) heap.push(i);
  }
  while (!heap.empty()) {
    const std::size_t i = heap.top();
    heap.pop();
    sink(std::move(cursors[i].current()));
    cursors[i].advance();
    if (cursors[i].valid()) heap.push(i);
  }
}

}  // namespace citematch
