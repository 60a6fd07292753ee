#pragma once

#include <string>

#include <json.hpp>

#include "core/gmm.hpp"
#include "core/recover.hpp"

namespace mucogarch {

using Json = nlohmann::ordered_json;

// Matrices serialize as row-major nested arrays.
Json mat_to_json(const Mat& M);
Mat mat_from_json(const Json& j);
Json vec_to_json(const Vec& v);
Vec vec_from_json(const Json& j);

// Model document: {d, A, B, C, sigma_W, cpp_rate, jump_scale, delta}.
struct ModelFile {
  MucogarchParams params;
  LevySpec levy;
  double delta = 0.0;
};
Json model_to_json(const ModelFile& m);
ModelFile model_from_json(const Json& j);

Json moment_vector_to_json(const MomentVector& k);
MomentVector moment_vector_from_json(const Json& j);

Json condition_report_to_json(const ConditionReport& r);
Json estimation_result_to_json(const EstimationResult& r);
Json recovery_to_json(const MomentInitResult& r);

// Whole-file helpers; parse failures raise ParseError naming the path.
Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

}  // namespace mucogarch
