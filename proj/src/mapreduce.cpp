#include "citematch/mapreduce.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <map>

#include "citematch/external_sort.hpp"

namespace citematch {

namespace {

std::string printable(std::string_view key) {
  std::string out;
  for (unsigned char c : key) {
    if (c >= 0x20 && c < 0x7F) {
      out.push_back(static_cast<char>(c));
    } else {
      static constexpr char kHex[] = "0123456789abcdef";
      out += "\\x";
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

struct InputRecordRef {
  std::size_t file;
  std::uint64_t offset;
};

class VectorEmitter : public Emitter {
 public:
  void emit(std::string key, std::string value) override {
    records.push_back({std::move(key), std::move(value)});
  }
  std::vector<KVRecord> records;
};

class SeqEmitter : public Emitter {
 public:
  explicit SeqEmitter(SeqWriter& w) : writer_(w) {}
  void emit(std::string key, std::string value) override {
    writer_.append(key, value);
    ++count;
  }
  std::uint64_t count = 0;

 private:
  SeqWriter& writer_;
};

class PartitionEmitter : public Emitter {
 public:
  explicit PartitionEmitter(std::vector<ExternalSorter>& sorters) : sorters_(sorters) {}
  void emit(std::string key, std::string value) override {
    const std::size_t p = partition_of(key, sorters_.size());
    sorters_[p].add(std::move(key), std::move(value));
    ++count;
  }
  std::uint64_t count = 0;

 private:
  std::vector<ExternalSorter>& sorters_;
};

template <typename Fn>
void call_user(const std::string& job, std::string_view key, const char* phase, Fn&& fn) {
  try {
    fn();
  } catch (const JobError&) {
    throw;
  } catch (const std::exception& e) {
    throw JobError(job, std::string(key),
                   job + ": " + phase + " failed at key '" + printable(key) + "': " + e.what());
  }
}

// Runs body(i) for i in [0, n) on `threads` threads, rethrowing the exception
// of the lowest failing index.
template <typename Body>
void parallel_for(std::size_t n, std::size_t threads, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for num_threads(static_cast<int>(threads)) schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void group_and_reduce(const std::string& job, std::vector<SortedRun> runs, const ReduceFn& reduce,
                      Emitter& out) {
  std::optional<std::string> current;
  std::vector<std::string> values;
  auto flush = [&] {
    if (!current) return;
    call_user(job, *current, "reduce", [&] { reduce(*current, values, out); });
    values.clear();
  };
  merge_runs(std::move(runs), [&](KVRecord&& rec) {
    if (!current || *current != rec.key) {
      flush();
      current = std::move(rec.key);
    }
    values.push_back(std::move(rec.value));
  });
  flush();
}

}  // namespace

std::size_t partition_of(std::string_view key, std::size_t partitions) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h % partitions);
}

JobStats run_job(const JobSpec& spec, const MapFn& map, const std::optional<ReduceFn>& reduce) {
  if (spec.workers < 1) throw UsageError("worker count must be at least 1");
  if (spec.partitions < 1) throw UsageError("partition count must be at least 1");
  if (spec.output.empty()) throw UsageError("job output path not set");
  const auto started = std::chrono::steady_clock::now();

  std::vector<InputRecordRef> refs;
  for (std::size_t f = 0; f < spec.inputs.size(); ++f) {
    for (auto offset : seq_record_offsets(spec.inputs[f])) refs.push_back({f, offset});
  }

  const auto scratch = (spec.scratch.empty() ? spec.output.parent_path() : spec.scratch) /
                       ("_" + spec.name + "-" + spec.output.filename().string() + ".tmp");
  std::filesystem::remove_all(scratch);
  std::filesystem::create_directories(scratch);

  const std::size_t splits = spec.workers;
  const std::size_t partitions = reduce ? spec.partitions : 1;
  // runs[split][partition]
  std::vector<std::vector<std::vector<SortedRun>>> split_runs(
      splits, std::vector<std::vector<SortedRun>>(partitions));
  std::vector<std::filesystem::path> split_outputs(splits);
  std::vector<std::uint64_t> map_counts(splits, 0);
  const std::size_t budget = std::max<std::size_t>(spec.memory_budget / (splits * partitions), 1 << 16);

  auto map_split = [&](std::size_t s) {
    const std::size_t begin = refs.size() * s / splits;
    const std::size_t end = refs.size() * (s + 1) / splits;
    std::vector<ExternalSorter> sorters;
    std::optional<SeqWriter> writer;
    if (reduce) {
      for (std::size_t p = 0; p < partitions; ++p) {
        sorters.emplace_back(scratch, "map" + std::to_string(s) + "-p" + std::to_string(p), budget);
      }
    } else {
      split_outputs[s] = scratch / ("map" + std::to_string(s) + ".seq");
      writer.emplace(split_outputs[s]);
    }
    std::optional<SeqReader> reader;
    std::size_t reader_file = 0;
    KVRecord rec;
    for (std::size_t i = begin; i < end; ++i) {
      if (!reader || reader_file != refs[i].file) {
        // Records of one file are contiguous in `refs`; read until the split ends.
        std::size_t last = i;
        while (last + 1 < end && refs[last + 1].file == refs[i].file) ++last;
        reader.emplace(spec.inputs[refs[i].file], refs[i].offset, last - i + 1);
        reader_file = refs[i].file;
      }
      reader->next(rec);
      if (reduce) {
        PartitionEmitter out(sorters);
        call_user(spec.name, rec.key, "map", [&] { map(rec, out); });
        map_counts[s] += out.count;
      } else {
        SeqEmitter out(*writer);
        call_user(spec.name, rec.key, "map", [&] { map(rec, out); });
        map_counts[s] += out.count;
      }
    }
    if (reduce) {
      for (std::size_t p = 0; p < partitions; ++p) split_runs[s][p] = sorters[p].finish();
    } else {
      writer->close();
    }
  };

  JobStats stats;
  stats.input_records = refs.size();
  try {
    parallel_for(splits, spec.workers, map_split);

    SeqWriter output(spec.output);
    auto append_file = [&](const std::filesystem::path& path) {
      SeqReader in(path);
      KVRecord rec;
      while (in.next(rec)) output.append(rec);
    };

    if (!reduce) {
      for (const auto& path : split_outputs) append_file(path);
    } else {
      // Split order within a partition makes ties merge in input order.
      std::vector<std::vector<SortedRun>> partition_runs(partitions);
      for (std::size_t s = 0; s < splits; ++s) {
        for (std::size_t p = 0; p < partitions; ++p) {
          for (auto& run : split_runs[s][p]) partition_runs[p].push_back(std::move(run));
        }
      }
      std::vector<std::filesystem::path> partition_outputs(partitions);
      parallel_for(partitions, spec.workers, [&](std::size_t p) {
        partition_outputs[p] = scratch / ("reduce" + std::to_string(p) + ".seq");
        SeqWriter writer(partition_outputs[p]);
        SeqEmitter out(writer);
        group_and_reduce(spec.name, std::move(partition_runs[p]), *reduce, out);
        writer.close();
      });
      for (const auto& path : partition_outputs) append_file(path);
    }
    stats.output_records = output.close();
  } catch (...) {
    std::filesystem::remove_all(scratch);
    throw;
  }
  std::filesystem::remove_all(scratch);

  for (auto c : map_counts) stats.map_output_records += c;
  stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return stats;
}

std::vector<KVRecord> run_job_serial(std::span<const KVRecord> input, const MapFn& map,
                                     const std::optional<ReduceFn>& reduce,
                                     std::size_t partitions) {
  VectorEmitter mapped;
  for (const auto& rec : input) map(rec, mapped);
  if (!reduce) return std::move(mapped.records);

  std::vector<std::vector<KVRecord>> parts(partitions);
  for (auto& rec : mapped.records) parts[partition_of(rec.key, partitions)].push_back(std::move(rec));
  VectorEmitter out;
  for (auto& part : parts) {
    std::stable_sort(part.begin(), part.end(),
                     [](const KVRecord& a, const KVRecord& b) { return a.key < b.key; });
    for (std::size_t i = 0; i < part.size();) {
      std::size_t j = i;
      std::vector<std::string> values;
      while (j < part.size() && part[j].key == part[i].key) values.push_back(part[j++].value);
      (*reduce)(part[i].key, values, out);
      i = j;
    }
  }
  return std::move(out.records);
}

}  // namespace citematch
