#include "core/json_io.hpp"

#include <fstream>
#include <sstream>

namespace mucogarch {

namespace {

double get_number(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    fail(ErrorCode::ParseError, std::string("missing or non-numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

int get_int(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    fail(ErrorCode::ParseError, std::string("missing or non-integer field '") + key + "'");
  }
  return j.at(key).get<int>();
}

const Json& get_field(const Json& j, const char* key) {
  if (!j.contains(key)) {
    fail(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

}  // namespace

Json mat_to_json(const Mat& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    fail(ErrorCode::ParseError, "matrix field must be a nested array");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.front().size());
  Mat M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j.at(static_cast<size_t>(i));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      fail(ErrorCode::ParseError, "matrix rows must all have the same length");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      const Json& cell = row.at(static_cast<size_t>(k));
      if (!cell.is_number()) fail(ErrorCode::ParseError, "matrix cells must be numeric");
      M(i, k) = cell.get<double>();
    }
  }
  return M;
}

Json vec_to_json(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vec vec_from_json(const Json& j) {
  if (!j.is_array()) fail(ErrorCode::ParseError, "vector field must be an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const Json& cell = j.at(static_cast<size_t>(i));
    if (!cell.is_number()) fail(ErrorCode::ParseError, "vector cells must be numeric");
    v(i) = cell.get<double>();
  }
  return v;
}

Json model_to_json(const ModelFile& m) {
  Json j;
  j["d"] = m.params.d;
  j["A"] = mat_to_json(m.params.A);
  j["B"] = mat_to_json(m.params.B);
  j["C"] = mat_to_json(m.params.C);
  j["sigma_W"] = m.levy.sigma_W;
  j["cpp_rate"] = m.levy.cpp_rate;
  j["jump_scale"] = m.levy.jump_scale;
  j["delta"] = m.delta;
  return j;
}

ModelFile model_from_json(const Json& j) {
  ModelFile m;
  m.params.d = get_int(j, "d");
  m.params.A = mat_from_json(get_field(j, "A"));
  m.params.B = mat_from_json(get_field(j, "B"));
  m.params.C = mat_from_json(get_field(j, "C"));
  m.levy = make_levy(get_number(j, "cpp_rate"), get_number(j, "jump_scale"),
                     get_number(j, "sigma_W"));
  m.delta = get_number(j, "delta");
  if (!(m.delta > 0.0)) fail(ErrorCode::ParseError, "delta must be positive");
  validate_params(m.params);
  return m;
}

Json moment_vector_to_json(const MomentVector& k) {
  Json j;
  j["d"] = k.d;
  j["r"] = k.r;
  j["delta"] = k.delta;
  j["mean_sq"] = vec_to_json(k.mean_sq());
  Json lags = Json::array();
  for (int h = 0; h <= k.r; ++h) {
    Json entry;
    entry["h"] = h;
    entry["matrix"] = mat_to_json(k.lag_block(h));
    lags.push_back(std::move(entry));
  }
  // Block h = 0 is the non-central fourth moment; h >= 1 are lag blocks.
  j["lag_blocks"] = std::move(lags);
  return j;
}

MomentVector moment_vector_from_json(const Json& j) {
  MomentVector k;
  k.d = get_int(j, "d");
  k.r = get_int(j, "r");
  k.delta = get_number(j, "delta");
  if (k.d < 1 || k.r < 0 || !(k.delta > 0.0)) {
    fail(ErrorCode::ParseError, "moment vector requires d >= 1, r >= 0, delta > 0");
  }
  const Eigen::Index d2 = static_cast<Eigen::Index>(k.d) * k.d;
  const Eigen::Index n4 = d2 * d2;
  k.values.resize(d2 + (static_cast<Eigen::Index>(k.r) + 1) * n4);
  k.values.segment(0, d2) = vec_from_json(get_field(j, "mean_sq"));
  const Json& lags = get_field(j, "lag_blocks");
  if (!lags.is_array() || static_cast<int>(lags.size()) != k.r + 1) {
    fail(ErrorCode::ParseError, "lag_blocks must hold h = 0..r entries");
  }
  for (const Json& entry : lags) {
    const int h = get_int(entry, "h");
    if (h < 0 || h > k.r) fail(ErrorCode::ParseError, "lag block index out of range");
    const Mat M = mat_from_json(get_field(entry, "matrix"));
    if (M.rows() != d2 || M.cols() != d2) {
      fail(ErrorCode::ParseError, "lag block has wrong shape");
    }
    k.values.segment(d2 + static_cast<Eigen::Index>(h) * n4, n4) = vec(M);
  }
  return k;
}

Json condition_report_to_json(const ConditionReport& r) {
  Json out = Json::array();
  for (const ConditionEntry& e : r.entries) {
    Json je;
    je["id"] = e.id;
    je["status"] = cond_status_name(e.status);
    je["value"] = e.value;
    je["detail"] = e.detail;
    out.push_back(std::move(je));
  }
  Json j;
  j["entries"] = std::move(out);
  j["all_pass"] = r.all_pass();
  return j;
}

Json estimation_result_to_json(const EstimationResult& r) {
  Json j;
  j["theta_hat"] = vec_to_json(r.theta_hat);
  j["objective"] = r.objective;
  j["converged"] = r.converged;
  j["converge_reason"] = r.converge_reason;
  j["weight_kind"] = weight_kind_name(r.weight_kind);
  j["iterations"] = r.iterations;
  if (r.has_sandwich) j["sandwich_cov"] = mat_to_json(r.sandwich_cov);
  if (!r.condition_report.entries.empty()) {
    j["condition_report"] = condition_report_to_json(r.condition_report);
  }
  if (!r.notes.empty()) j["notes"] = r.notes;
  if (r.theta_step1.size() > 0) {
    j["theta_step1"] = vec_to_json(r.theta_step1);
    j["objective_step1"] = r.objective_step1;
    j["step1_converged"] = r.step1_converged;
  }
  return j;
}

Json recovery_to_json(const MomentInitResult& r) {
  Json j;
  j["ok"] = r.ok;
  if (r.ok) j["theta"] = vec_to_json(r.theta);
  if (!r.ok) {
    j["error"] = error_code_name(r.error);
    j["message"] = r.message;
  }
  if (r.detail.A.size() > 0) {
    Json d;
    d["A"] = mat_to_json(r.detail.A);
    d["B"] = mat_to_json(r.detail.B);
    d["C"] = mat_to_json(r.detail.C);
    d["residual_expB"] = r.detail.residual_expB;
    d["residual_calB"] = r.detail.residual_calB;
    d["residual_C"] = r.detail.residual_C;
    d["feasible"] = r.detail.feasible;
    d["C_pd"] = r.detail.C_pd;
    j["detail"] = std::move(d);
  }
  return j;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const std::exception& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
}

void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ParseError, "cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorCode::ParseError, "short write to " + path);
}

}  // namespace mucogarch
