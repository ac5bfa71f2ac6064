#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hazardlab/model.hpp"
#include "hazardlab/survival.hpp"
#include "hazardlab/synthcohort.hpp"

namespace hazardlab {

/// One subject per line:
/// {"id", "observed_time", "censored", "true_risk"?, "instances", "instance_labels"?}
void save_cohort_jsonl(const std::filesystem::path& path,
                       const std::vector<SubjectRecord>& cohort);
std::vector<SubjectRecord> load_cohort_jsonl(const std::filesystem::path& path);

/// Generator parameters only; per-subject risks live in the cohort file.
void save_oracle(const std::filesystem::path& path, const OracleModel& oracle);
OracleModel load_oracle(const std::filesystem::path& path);

/// Versioned container: model config, grid, named parameter arrays and the
/// optional binary-relapse submodel. Round-trips bit-exactly.
struct Checkpoint {
  ModelConfig config;
  TimeGrid grid;
  ModelParams params;
  std::optional<BinaryRelapseModel> binary_model;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// CSV with a provenance comment line ("# hazardlab <version> seed=... config=...")
/// followed by a header row.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& provenance,
            const std::vector<std::string>& header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<std::string>& cells);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string format_double(double value);
std::string provenance_line(std::uint64_t seed, std::uint64_t config_hash);

}  // namespace hazardlab
