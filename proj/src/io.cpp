#include "hazardlab/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hazardlab/errors.hpp"
#include "hazardlab/numeric.hpp"

namespace hazardlab {

using nlohmann::json;

namespace {

json subject_to_json(const SubjectRecord& s) {
  json j;
  j["id"] = s.id;
  j["observed_time"] = s.observed_time;
  j["censored"] = s.censored;
  if (s.true_risk) j["true_risk"] = *s.true_risk;
  j["instances"] = s.bag;
  if (s.instance_labels) {
    std::vector<bool> labels(s.instance_labels->begin(), s.instance_labels->end());
    j["instance_labels"] = labels;
  }
  return j;
}

SubjectRecord subject_from_json(const json& j) {
  SubjectRecord s;
  s.id = j.at("id").get<std::string>();
  s.observed_time = j.at("observed_time").get<double>();
  s.censored = j.at("censored").get<bool>();
  if (j.contains("true_risk")) s.true_risk = j.at("true_risk").get<double>();
  s.bag = j.at("instances").get<std::vector<std::vector<double>>>();
  if (j.contains("instance_labels")) {
    const auto labels = j.at("instance_labels").get<std::vector<bool>>();
    s.instance_labels.emplace(labels.begin(), labels.end());
  }
  s.validate();
  return s;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) raise(ErrorKind::io, "empty parameter array");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size())
      raise(ErrorKind::io, "ragged parameter array");
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return m;
}

}  // namespace

void save_cohort_jsonl(const std::filesystem::path& path,
                       const std::vector<SubjectRecord>& cohort) {
  std::ofstream out(path);
  if (!out) raise(ErrorKind::io, "cannot write " + path.string());
  for (const auto& s : cohort) out << subject_to_json(s).dump() << '\n';
  if (!out) raise(ErrorKind::io, "write failed for " + path.string());
}

std::vector<SubjectRecord> load_cohort_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::io, "cannot open " + path.string());
  std::vector<SubjectRecord> cohort;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      cohort.push_back(subject_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      raise(ErrorKind::io,
            path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cohort;
}

void save_oracle(const std::filesystem::path& path, const OracleModel& oracle) {
  json j;
  j["format"] = "hazardlab-oracle";
  j["version"] = 1;
  j["base_hazard"] = oracle.base_hazard;
  j["risk_effect"] = oracle.risk_effect;
  std::ofstream out(path);
  if (!out) raise(ErrorKind::io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

OracleModel load_oracle(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::io, "cannot open " + path.string());
  json j;
  try {
    in >> j;
    if (j.at("format").get<std::string>() != "hazardlab-oracle")
      raise(ErrorKind::io, path.string() + ": not an oracle file");
    OracleModel oracle;
    oracle.base_hazard = j.at("base_hazard").get<double>();
    oracle.risk_effect = j.at("risk_effect").get<double>();
    return oracle;
  } catch (const json::exception& e) {
    raise(ErrorKind::io, path.string() + ": " + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  json j;
  j["format"] = "hazardlab-checkpoint";
  j["version"] = 1;
  json cfg;
  const ModelConfig& c = checkpoint.config;
  cfg["feature_dim"] = c.feature_dim;
  cfg["encoder_hidden"] = c.encoder_hidden;
  cfg["embed_dim"] = c.embed_dim;
  cfg["use_self_attention"] = c.use_self_attention;
  cfg["use_mil"] = c.use_mil;
  cfg["use_binary_feature"] = c.use_binary_feature;
  cfg["mil_on_hazards"] = c.mil_on_hazards;
  cfg["gru_hidden"] = c.gru_hidden;
  cfg["interval_count"] = c.interval_count;
  cfg["attention_hidden"] = c.attention_hidden;
  cfg["seed"] = c.seed;
  j["config"] = cfg;
  j["grid_boundaries"] = checkpoint.grid.boundaries;

  json params;
  const auto tensors = checkpoint.params.tensors();
  const auto& names = ModelParams::tensor_names();
  for (int i = 0; i < ModelParams::kTensorCount; ++i)
    params[names[i]] = matrix_to_json(*tensors[i]);
  j["params"] = params;

  if (checkpoint.binary_model) {
    json bin;
    bin["weights"] = std::vector<double>(
        checkpoint.binary_model->weights.data(),
        checkpoint.binary_model->weights.data() + checkpoint.binary_model->weights.size());
    bin["bias"] = checkpoint.binary_model->bias;
    j["binary_model"] = bin;
  }

  std::ofstream out(path);
  if (!out) raise(ErrorKind::io, "cannot write " + path.string());
  out << j.dump() << '\n';
  if (!out) raise(ErrorKind::io, "write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::io, "cannot open " + path.string());
  json j;
  try {
    in >> j;
    if (j.at("format").get<std::string>() != "hazardlab-checkpoint")
      raise(ErrorKind::io, path.string() + ": not a checkpoint file");

    Checkpoint ck;
    const json& cfg = j.at("config");
    ck.config.feature_dim = cfg.at("feature_dim").get<int>();
    ck.config.encoder_hidden = cfg.at("encoder_hidden").get<int>();
    ck.config.embed_dim = cfg.at("embed_dim").get<int>();
    ck.config.use_self_attention = cfg.at("use_self_attention").get<bool>();
    ck.config.use_mil = cfg.at("use_mil").get<bool>();
    ck.config.use_binary_feature = cfg.at("use_binary_feature").get<bool>();
    ck.config.mil_on_hazards = cfg.at("mil_on_hazards").get<bool>();
    ck.config.gru_hidden = cfg.at("gru_hidden").get<int>();
    ck.config.interval_count = cfg.at("interval_count").get<int>();
    ck.config.attention_hidden = cfg.at("attention_hidden").get<int>();
    ck.config.seed = cfg.at("seed").get<std::uint64_t>();
    ck.grid = TimeGrid::from_boundaries(j.at("grid_boundaries").get<std::vector<double>>());

    const json& params = j.at("params");
    const auto tensors = ck.params.tensors();
    const auto& names = ModelParams::tensor_names();
    for (int i = 0; i < ModelParams::kTensorCount; ++i)
      *tensors[i] = matrix_from_json(params.at(names[i]));

    if (j.contains("binary_model")) {
      BinaryRelapseModel bin;
      const auto w = j.at("binary_model").at("weights").get<std::vector<double>>();
      bin.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
      bin.bias = j.at("binary_model").at("bias").get<double>();
      ck.binary_model = std::move(bin);
    }
    return ck;
  } catch (const json::exception& e) {
    raise(ErrorKind::io, path.string() + ": " + e.what());
  }
}

struct CsvWriter::Impl {
  std::ofstream out;
  std::filesystem::path path;
};

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& provenance,
                     const std::vector<std::string>& header)
    : impl_(new Impl{std::ofstream(path), path}) {
  if (!impl_->out) raise(ErrorKind::io, "cannot write " + path.string());
  impl_->out << "# " << provenance << '\n';
  row(header);
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) impl_->out << ',';
    impl_->out << cells[i];
  }
  impl_->out << '\n';
  if (!impl_->out) raise(ErrorKind::io, "write failed for " + impl_->path.string());
}

std::string format_double(double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

std::string provenance_line(std::uint64_t seed, std::uint64_t config_hash) {
  std::ostringstream os;
  os << "hazardlab " << num::kVersion << " seed=" << seed << " config=" << std::hex
     << config_hash;
  return os.str();
}

}  // namespace hazardlab
