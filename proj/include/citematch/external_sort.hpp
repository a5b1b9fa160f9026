#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "citematch/seqfile.hpp"

namespace citematch {

// A sorted run: either still in memory or spilled to a SeqFile.
struct SortedRun {
  std::vector<KVRecord> records;
  std::filesystem::path file;  // empty for in-memory runs
};

// Buffers records, sorting and spilling to disk whenever the buffer exceeds
// the memory budget. Sorting is by key bytes and stable.
class ExternalSorter {
 public:
  ExternalSorter(std::filesystem::path scratch_dir, std::string run_prefix,
                 std::size_t memory_budget);

  void add(std::string key, std::string value);
  // Sorted runs in creation order; the sorter is left empty.
  std::vector<SortedRun> finish();

  std::size_t spilled_runs() const { return spills_; }

 private:
  void spill();

  std::filesystem::path scratch_;
  std::string prefix_;
  std::size_t budget_;
  std::size_t used_ = 0;
  std::size_t spills_ = 0;
  std::vector<KVRecord> buffer_;
  std::vector<SortedRun> runs_;
};

// K-way merge of sorted runs. Equal keys come out in run order, so merging
// runs listed in input order yields a stable sort of the whole input.
void merge_runs(std::vector<SortedRun> runs, const std::function<void(KVRecord&&)>& sink);

}  // namespace citematch
