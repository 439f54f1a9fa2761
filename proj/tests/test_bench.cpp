// Copyright 2026 The ppmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ppmc/bench.hpp"

using namespace ppmc;

namespace {
std::string temp_path(const char* name) {
  return std::string("ppmc_test_") + name;
}
}  // namespace

TEST_CASE("bench_synthetic empty size list yields no rows") {
  CHECK(bench_synthetic({}, {10}, {"pplnm-qr"}, 1).empty());
}

TEST_CASE("bench_synthetic grid shape and contents") {
  const auto rows = bench_synthetic({{32, 32}, {48, 32}}, {5, 10},
                                    {"pplnm-qr", "alt-min"}, 5);
  REQUIRE(rows.size() == 8);
  int pplnm = 0, altmin = 0;
  for (const auto& r : rows) {
    CHECK((r.rows == 32 || r.rows == 48));
    CHECK(r.cols == 32);
    CHECK((r.iters == 5 || r.iters == 10));
    CHECK(r.wall_time >= 0.0);
    CHECK(r.rse_value >= 0.0);
    if (r.algo == "pplnm-qr") ++pplnm;
    if (r.algo == "alt-min") ++altmin;
  }
  CHECK(pplnm == 4);
  CHECK(altmin == 4);
}

TEST_CASE("bench_synthetic accuracy improves with more iterations") {
  const auto rows =
      bench_synthetic({{128, 128}}, {1, 100}, {"pplnm-qr"}, 17);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].rse_value < rows[0].rse_value);
  CHECK(rows[1].rse_value <= 1e-8);
}

TEST_CASE("loss_sweep quartiles and validation") {
  SolverConfig cfg;
  cfg.max_iters = 60;
  const auto rows = loss_sweep(32, 8, 2, {0.0, 0.3}, 3, cfg, 9);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.seeds == 3);
    CHECK(r.q25 <= r.median_rse);
    CHECK(r.median_rse <= r.q75);
  }
  // Nothing lost: recovery is near exact.
  CHECK(rows[0].median_rse <= 1e-8);
  // Heavier loss cannot beat no loss.
  CHECK(rows[1].median_rse >= rows[0].median_rse);

  CHECK_THROWS_AS(loss_sweep(16, 4, 1, {1.0}, 1, cfg, 0), std::domain_error);
  CHECK_THROWS_AS(loss_sweep(16, 4, 1, {-0.1}, 1, cfg, 0), std::domain_error);
}

TEST_CASE("loss_sweep with one seed collapses the quartiles") {
  SolverConfig cfg;
  cfg.max_iters = 40;
  const auto rows = loss_sweep(24, 6, 2, {0.2}, 1, cfg, 13);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].q25 == rows[0].median_rse);
  CHECK(rows[0].q75 == rows[0].median_rse);
}

TEST_CASE("loss_sweep is deterministic per seed") {
  SolverConfig cfg;
  cfg.max_iters = 40;
  const auto a = loss_sweep(24, 6, 2, {0.3}, 2, cfg, 21);
  const auto b = loss_sweep(24, 6, 2, {0.3}, 2, cfg, 21);
  CHECK(a[0].median_rse == b[0].median_rse);
  CHECK(a[0].q25 == b[0].q25);
  CHECK(a[0].q75 == b[0].q75);
}

TEST_CASE("emit_report csv round trips through parse_report_csv") {
  const std::vector<BenchRow> rows{
      {128, 128, 100, "pplnm-qr", 0.0123456789012345, 4.5e-15},
      {512, 512, 50, "alt-min", 1.25, 0.75},
  };
  const std::string path = temp_path("report.csv");
  emit_report(rows, "csv", path, ReportMeta{42, "smoke"});
  std::ifstream f(path);
  REQUIRE(f.good());
  const auto back = parse_report_csv(f);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].rows == rows[i].rows);
    CHECK(back[i].cols == rows[i].cols);
    CHECK(back[i].iters == rows[i].iters);
    CHECK(back[i].algo == rows[i].algo);
    CHECK(back[i].wall_time == rows[i].wall_time);
    CHECK(back[i].rse_value == rows[i].rse_value);
  }
  std::remove(path.c_str());
}

TEST_CASE("emit_report json schema") {
  const std::vector<BenchRow> rows{{64, 64, 10, "pplnm-qr", 0.5, 1e-10}};
  const std::string path = temp_path("report.json");
  emit_report(rows, "json", path, ReportMeta{7, "cfg"});
  std::ifstream f(path);
  REQUIRE(f.good());
  const nlohmann::json j = nlohmann::json::parse(f);
  CHECK(j.at("version").get<std::string>() == kArtifactVersion);
  CHECK(j.at("seed").get<Seed>() == 7);
  REQUIRE(j.at("rows").size() == 1);
  CHECK(j["rows"][0].at("algo") == "pplnm-qr");
  CHECK(j["rows"][0].at("rse").get<double>() == 1e-10);
  CHECK(j["rows"][0].at("wall_time_s").get<double>() == 0.5);
  std::remove(path.c_str());

  CHECK_THROWS_AS(emit_report(rows, "xml", temp_path("r.xml")),
                  std::invalid_argument);
}

TEST_CASE("emit_sweep writes a versioned header and parsable rows") {
  const std::vector<SweepRow> rows{{0.3, 0.01, 0.005, 0.02, 5}};
  const std::string path = temp_path("sweep.csv");
  emit_sweep(rows, path, ReportMeta{3, ""});
  std::ifstream f(path);
  REQUIRE(f.good());
  std::string line;
  std::getline(f, line);
  CHECK(line.find(kArtifactVersion) != std::string::npos);
  std::getline(f, line);
  CHECK(line == "alpha,median_rse,q25,q75,seeds");
  std::getline(f, line);
  CHECK(line.rfind("0.2999", 0) == 0);
  std::remove(path.c_str());
}

TEST_CASE("bench_synthetic determinism") {
  const auto a = bench_synthetic({{48, 48}}, {20}, {"pplnm-qr"}, 77);
  const auto b = bench_synthetic({{48, 48}}, {20}, {"pplnm-qr"}, 77);
  REQUIRE(a.size() == b.size());
  CHECK(a[0].rse_value == b[0].rse_value);
}
