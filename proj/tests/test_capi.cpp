#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "mucogarch.h"

using Json = nlohmann::json;

namespace {

const char* kModelJson = R"({
  "d": 2,
  "A": [[0.85, 0.10], [-0.10, 0.75]],
  "B": [[-2.43, 0.05], [0.05, -2.42]],
  "C": [[1.0, 0.5], [0.5, 1.5]],
  "sigma_W": 1.0,
  "cpp_rate": 4.0,
  "jump_scale": 0.25,
  "delta": 0.1
})";

struct ModelGuard {
  mcg_model* m = nullptr;
  ModelGuard() { REQUIRE(mcg_model_from_json(kModelJson, &m) == MCG_OK); }
  ~ModelGuard() { mcg_model_free(m); }
};

std::string take(char* s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  mcg_string_free(s);
  return out;
}

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("identity, status names, and null-argument handling") {
  CHECK(mcg_version() != nullptr);
  CHECK(std::strlen(mcg_version()) > 0);
  CHECK(std::string(mcg_status_name(MCG_OK)) == "ok");
  CHECK(mcg_status_name(MCG_INVALID_CONFIG) != nullptr);
  CHECK(mcg_status_name(MCG_PARSE_ERROR) != nullptr);
  CHECK(mcg_status_name(MCG_SHAPE_ERROR) != nullptr);
  CHECK(mcg_status_name(MCG_RUNTIME_ERROR) != nullptr);
  CHECK(mcg_status_name(999) != nullptr);

  mcg_model* m = nullptr;
  CHECK(mcg_model_from_json(nullptr, &m) == MCG_INVALID_CONFIG);
  CHECK(mcg_model_from_json(kModelJson, nullptr) == MCG_INVALID_CONFIG);
  char* out = nullptr;
  CHECK(mcg_model_to_json(nullptr, &out) == MCG_INVALID_CONFIG);
  CHECK(mcg_model_moments(nullptr, 2, &out) == MCG_INVALID_CONFIG);
  mcg_model_free(nullptr);  // free of NULL is a no-op
  mcg_sample_free(nullptr);
  mcg_string_free(nullptr);
}

TEST_CASE("malformed json is a parse error with a message") {
  mcg_model* m = nullptr;
  CHECK(mcg_model_from_json("{ not json", &m) == MCG_PARSE_ERROR);
  CHECK(m == nullptr);
  CHECK(std::strlen(mcg_last_error()) > 0);

  CHECK(mcg_model_from_json(R"({"d": 2})", &m) != MCG_OK);
  CHECK(mcg_model_from_file("/nonexistent/path.json", &m) != MCG_OK);
}

TEST_CASE("model json round trip preserves every field") {
  ModelGuard g;
  char* out = nullptr;
  REQUIRE(mcg_model_to_json(g.m, &out) == MCG_OK);
  const Json j = Json::parse(take(out));
  CHECK(j["d"] == 2);
  CHECK(j["A"][0][0] == 0.85);
  CHECK(j["A"][1][0] == -0.10);
  CHECK(j["B"][0][1] == 0.05);
  CHECK(j["C"][1][1] == 1.5);
  CHECK(j["sigma_W"] == 1.0);
  CHECK(j["cpp_rate"] == 4.0);
  CHECK(j["jump_scale"] == 0.25);
  CHECK(j["delta"] == 0.1);

  mcg_model* again = nullptr;
  REQUIRE(mcg_model_from_json(j.dump().c_str(), &again) == MCG_OK);
  char* out2 = nullptr;
  REQUIRE(mcg_model_to_json(again, &out2) == MCG_OK);
  CHECK(take(out2) == j.dump(2) + "\n");
  mcg_model_free(again);
}

TEST_CASE("simulate, write csv, read csv: dims and grid width survive") {
  ModelGuard g;
  mcg_sample* s = nullptr;
  REQUIRE(mcg_simulate(g.m, 500, 4, -1.0, 2024, 0, 1, &s) == MCG_OK);
  long long n = 0;
  int d = 0;
  double delta = 0.0;
  REQUIRE(mcg_sample_dims(s, &n, &d, &delta) == MCG_OK);
  CHECK(n == 500);
  CHECK(d == 2);
  CHECK(delta == 0.1);

  const auto path = temp_file("mcg_capi_returns.csv");
  const auto vol_path = temp_file("mcg_capi_vol.csv");
  REQUIRE(mcg_sample_write_csv(s, path.string().c_str()) == MCG_OK);
  REQUIRE(mcg_sample_write_vol_csv(s, vol_path.string().c_str()) == MCG_OK);
  CHECK(std::filesystem::file_size(vol_path) > 0);

  mcg_sample* back = nullptr;
  REQUIRE(mcg_sample_from_csv(path.string().c_str(), 0.0, &back) == MCG_OK);
  REQUIRE(mcg_sample_dims(back, &n, &d, &delta) == MCG_OK);
  CHECK(n == 500);
  CHECK(d == 2);
  CHECK(delta == doctest::Approx(0.1).epsilon(1e-12));

  // Same draw again is bitwise identical through the JSON moment vector.
  mcg_sample* s2 = nullptr;
  REQUIRE(mcg_simulate(g.m, 500, 4, -1.0, 2024, 0, 0, &s2) == MCG_OK);
  char* k1 = nullptr;
  char* k2 = nullptr;
  REQUIRE(mcg_sample_moments(s, 2, 0, &k1) == MCG_OK);
  REQUIRE(mcg_sample_moments(s2, 2, 0, &k2) == MCG_OK);
  CHECK(take(k1) == take(k2));

  mcg_sample_free(s);
  mcg_sample_free(s2);
  mcg_sample_free(back);
  std::filesystem::remove(path);
  std::filesystem::remove(vol_path);
}

TEST_CASE("sample scaling multiplies returns in place") {
  ModelGuard g;
  mcg_sample* s = nullptr;
  REQUIRE(mcg_simulate(g.m, 200, 4, -1.0, 7, 0, 0, &s) == MCG_OK);
  char* before = nullptr;
  REQUIRE(mcg_sample_moments(s, 2, 0, &before) == MCG_OK);
  const Json jb = Json::parse(take(before));
  REQUIRE(mcg_sample_scale(s, 10.0) == MCG_OK);
  char* after = nullptr;
  REQUIRE(mcg_sample_moments(s, 2, 0, &after) == MCG_OK);
  const Json ja = Json::parse(take(after));
  // Squared-return means scale by 100.
  const double b0 = jb["mean_sq"][0].get<double>();
  const double a0 = ja["mean_sq"][0].get<double>();
  CHECK(a0 == doctest::Approx(100.0 * b0).epsilon(1e-12));
  mcg_sample_free(s);
}

TEST_CASE("model and sample moment vectors share the labeled json layout") {
  ModelGuard g;
  char* out = nullptr;
  REQUIRE(mcg_model_moments(g.m, 3, &out) == MCG_OK);
  const Json j = Json::parse(take(out));
  CHECK(j["d"] == 2);
  CHECK(j["r"] == 3);
  CHECK(j["delta"] == 0.1);
  CHECK(j["mean_sq"].size() == 4);
  REQUIRE(j["lag_blocks"].size() == 4);
  CHECK(j["lag_blocks"][0]["h"] == 0);
  CHECK(j["lag_blocks"][3]["h"] == 3);
  REQUIRE(j["lag_blocks"][1]["matrix"].size() == 4);
  CHECK(j["lag_blocks"][1]["matrix"][0].size() == 4);

  CHECK(mcg_model_moments(g.m, 0, &out) != MCG_OK);  // r must be positive
}

TEST_CASE("condition report json carries entries and the overall verdict") {
  ModelGuard g;
  char* out = nullptr;
  REQUIRE(mcg_check(g.m, 200000, 7, &out) == MCG_OK);
  const Json j = Json::parse(take(out));
  REQUIRE(j.contains("entries"));
  REQUIRE(j.contains("all_pass"));
  CHECK(j["entries"].size() >= 12);
  bool saw_f6 = false;
  for (const auto& e : j["entries"]) {
    CHECK(e.contains("id"));
    CHECK(e.contains("status"));
    CHECK(e.contains("value"));
    if (e["id"] == "f.6") {
      saw_f6 = true;
      CHECK(e["status"] == "pass");
    }
  }
  CHECK(saw_f6);
}

TEST_CASE("recovery from exact model moments reproduces the parameters") {
  ModelGuard g;
  char* mom = nullptr;
  REQUIRE(mcg_model_moments(g.m, 3, &mom) == MCG_OK);
  const std::string moments = take(mom);
  char* out = nullptr;
  REQUIRE(mcg_recover(g.m, moments.c_str(), &out) == MCG_OK);
  const Json j = Json::parse(take(out));
  REQUIRE(j["ok"] == true);
  REQUIRE(j["theta"].size() == 10);
  const double expect[10] = {0.85, 0.10, -0.10, 0.75, -2.43, 0.05, -2.42, 1.0, 0.5, 1.5};
  for (int i = 0; i < 10; ++i) {
    CHECK(j["theta"][i].get<double>() == doctest::Approx(expect[i]).epsilon(1e-6));
  }

  CHECK(mcg_recover(g.m, "{ bad", &out) == MCG_PARSE_ERROR);
}

TEST_CASE("estimation over the c api runs and reports bookkeeping") {
  ModelGuard g;
  mcg_sample* s = nullptr;
  REQUIRE(mcg_simulate(g.m, 400, 4, -1.0, 99, 0, 0, &s) == MCG_OK);
  const Json options = {
      {"r", 2},           {"weight", "identity"}, {"init", "model"},
      {"max_evals", 800}, {"attach_report", false},
  };
  char* out = nullptr;
  REQUIRE(mcg_estimate(s, g.m, options.dump().c_str(), &out) == MCG_OK);
  const Json j = Json::parse(take(out));
  CHECK(j.contains("theta_hat"));
  CHECK(j.contains("converged"));
  CHECK(j.contains("objective"));
  CHECK(j.contains("iterations"));
  CHECK(j["theta_hat"].size() == 10);
  CHECK(j["r"] == 2);
  CHECK(j["n"] == 400);
  CHECK(j["init_policy"] == "model");
  CHECK(j["weight_kind"] == "identity");

  // Identity weight cannot drive a two-step fit.
  const Json bad = {{"r", 2}, {"two_step", true}, {"weight", "identity"}};
  CHECK(mcg_estimate(s, g.m, bad.dump().c_str(), &out) == MCG_INVALID_CONFIG);

  // Missing r is rejected.
  CHECK(mcg_estimate(s, g.m, "{}", &out) != MCG_OK);
  mcg_sample_free(s);
}

TEST_CASE("study over the c api writes its outputs") {
  const Json cfg = {
      {"theta0", {0.85, 0.10, -0.10, 0.75, -2.43, 0.05, -2.42, 1.0, 0.5, 1.5}},
      {"cpp_rate", 4.0},
      {"jump_scale", 0.25},
      {"sigma_W", 1.0},
      {"delta", 0.1},
      {"n_list", {200}},
      {"r_list", {2}},
      {"replicates", 10},
      {"seed", 3},
      {"init_policy", "truth"},
      {"init_radius", 0.05},
      {"max_evals", 20000},
  };
  const auto dir = temp_file("mcg_capi_study");
  std::filesystem::remove_all(dir);
  char* out = nullptr;
  REQUIRE(mcg_study(cfg.dump().c_str(), dir.string().c_str(), 2, &out) == MCG_OK);
  const Json j = Json::parse(take(out));
  CHECK(j["cells"].size() == 1);
  CHECK(j["cells"][0]["replicates"] == 10);
  CHECK(std::filesystem::exists(dir / "summary.json"));
  CHECK(std::filesystem::exists(dir / "bias_std.csv"));
  std::filesystem::remove_all(dir);
}
