#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citematch/error.hpp"
#include "citematch/seqfile.hpp"

namespace citematch {

class Emitter {
 public:
  virtual ~Emitter() = default;
  virtual void emit(std::string key, std::string value) = 0;
};

using MapFn = std::function<void(const KVRecord& input, Emitter& out)>;
using ReduceFn =
    std::function<void(std::string_view key, std::span<const std::string> values, Emitter& out)>;

struct JobSpec {
  std::string name = "job";
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path output;
  std::filesystem::path scratch;
  std::size_t workers = 1;
  // Reduce partitions. Fixed per job so the output does not depend on workers.
  std::size_t partitions = 4;
  std::size_t memory_budget = 256u << 20;
};

struct JobStats {
  std::uint64_t input_records = 0;
  std::uint64_t map_output_records = 0;
  std::uint64_t output_records = 0;
  double seconds = 0.0;
};

// A map or reduce function threw; `key` is the record key it was processing.
class JobError : public DataError {
 public:
  JobError(std::string job, std::string key, const std::string& what)
      : DataError(what), job_(std::move(job)), key_(std::move(key)) {}

  const std::string& job() const { return job_; }
  const std::string& key() const { return key_; }

 private:
  std::string job_;
  std::string key_;
};

// Runs a map-reduce job over SeqFile inputs on `workers` OpenMP threads.
//
// The input is split into contiguous ranges, one per worker. Without a reduce
// function the output is the map output in input order. With one, map output
// is hash-partitioned, stably sorted by key within each partition (ties keep
// input order), grouped and reduced; partitions are written in order. Either
// way the output bytes do not depend on the worker count.
JobStats run_job(const JobSpec& spec, const MapFn& map,
                 const std::optional<ReduceFn>& reduce = std::nullopt);

// Serial in-memory execution of the same contract; kept as a test oracle.
std::vector<KVRecord> run_job_serial(std::span<const KVRecord> input, const MapFn& map,
                                     const std::optional<ReduceFn>& reduce,
                                     std::size_t partitions);

std::size_t partition_of(std::string_view key, std::size_t partitions);

}  // namespace citematch
