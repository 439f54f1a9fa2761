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
//
// GPS trajectory ingestion (Geolife PLT files), resampling onto a fixed time
// grid, and assembly into completion matrices. Latitude and longitude are
// kept in degrees as two parallel matrices sharing one observation mask.

#ifndef PPMC_TRAJECTORY_HPP_
#define PPMC_TRAJECTORY_HPP_

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "ppmc/matrix.hpp"

namespace ppmc {

struct TrajectoryPoint {
  double timestamp;  // seconds since the PLT epoch (1899-12-30)
  double lat;        // degrees, [-90, 90]
  double lon;        // degrees, [-180, 180]
};

struct SampledTrack {
  std::string user_id;
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<double> lat_series;
  std::vector<double> lon_series;
  std::vector<std::uint8_t> observed;

  std::size_t size() const { return lat_series.size(); }
};

struct TrackMatrixPair {
  Matrix lat_mat;
  Matrix lon_mat;
  ObservationMask mask;
  std::vector<std::string> user_order;
  double t0 = 0.0;
  double dt = 1.0;
};

struct TrackRse {
  std::vector<double> per_user;
  double aggregate = 0.0;
};

struct PltParseError : std::runtime_error {
  std::size_t line;
  PltParseError(std::size_t line_no, const std::string& what)
      : std::runtime_error("PLT line " + std::to_string(line_no) + ": " + what),
        line(line_no) {}
};

constexpr int kPltHeaderLines = 6;
constexpr double kSecondsPerDay = 86400.0;

/// Parses a Geolife PLT body: 6 header lines followed by records
/// `lat,lon,0,altitude,days,date,time`. Timestamps come from the fractional
/// day-count field.
inline std::vector<TrajectoryPoint> parse_plt(const std::string& content) {
  std::istringstream is(content);
  std::string line;
  std::size_t lineno = 0;
  std::vector<TrajectoryPoint> points;
  while (std::getline(is, line)) {
    ++lineno;
    if (lineno <= kPltHeaderLines) continue;
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() < 5)
      throw PltParseError(lineno, "expected at least 5 comma-separated fields");
    TrajectoryPoint p{};
    try {
      p.lat = std::stod(fields[0]);
      p.lon = std::stod(fields[1]);
      p.timestamp = std::stod(fields[4]) * kSecondsPerDay;
    } catch (const std::exception&) {
      throw PltParseError(lineno, "malformed numeric field");
    }
    if (!(p.lat >= -90.0 && p.lat <= 90.0))
      throw PltParseError(lineno, "latitude out of range");
    if (!(p.lon >= -180.0 && p.lon <= 180.0))
      throw PltParseError(lineno, "longitude out of range");
    if (!std::isfinite(p.timestamp))
      throw PltParseError(lineno, "non-finite timestamp");
    points.push_back(p);
  }
  if (points.empty())
    throw std::runtime_error("PLT file contains no trajectory points");
  return points;
}

/// Samples the track at the grid instants t0 + i*dt by linear interpolation
/// between the bracketing points. Instants outside the recorded span are
/// marked unobserved with value zero.
inline SampledTrack resample(std::vector<TrajectoryPoint> points, double t0,
                             double dt, std::size_t n,
                             std::string user_id = {}) {
  if (!(dt > 0.0)) throw std::domain_error("resample: dt must be positive");
  if (n < 1) throw std::domain_error("resample: need at least one slot");
  if (points.empty()) throw std::domain_error("resample: no points");
  std::stable_sort(points.begin(), points.end(),
                   [](const TrajectoryPoint& a, const TrajectoryPoint& b) {
                     return a.timestamp < b.timestamp;
                   });
  SampledTrack track;
  track.user_id = std::move(user_id);
  track.t0 = t0;
  track.dt = dt;
  track.lat_series.assign(n, 0.0);
  track.lon_series.assign(n, 0.0);
  track.observed.assign(n, 0);

  std::size_t hi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ts = t0 + static_cast<double>(i) * dt;
    if (ts < points.front().timestamp || ts > points.back().timestamp)
      continue;
    while (hi + 1 < points.size() && points[hi].timestamp < ts) ++hi;
    // points[hi] is the first point with timestamp >= ts (hi may be 0).
    if (points[hi].timestamp == ts || hi == 0) {
      track.lat_series[i] = points[hi].lat;
      track.lon_series[i] = points[hi].lon;
    } else {
      const TrajectoryPoint& a = points[hi - 1];
      const TrajectoryPoint& b = points[hi];
      const double span = b.timestamp - a.timestamp;
      const double w = span > 0.0 ? (ts - a.timestamp) / span : 0.0;
      track.lat_series[i] = a.lat + w * (b.lat - a.lat);
      track.lon_series[i] = a.lon + w * (b.lon - a.lon);
    }
    track.observed[i] = 1;
  }
  return track;
}

inline TrackMatrixPair assemble_matrices(
    const std::vector<SampledTrack>& tracks) {
  if (tracks.empty())
    throw std::invalid_argument("assemble_matrices: no tracks");
  const std::size_t n = tracks.front().size();
  const double t0 = tracks.front().t0, dt = tracks.front().dt;
  Matrix lat(static_cast<Index>(n), static_cast<Index>(tracks.size()));
  Matrix lon(static_cast<Index>(n), static_cast<Index>(tracks.size()));
  Matrix bits(static_cast<Index>(n), static_cast<Index>(tracks.size()));
  std::vector<std::string> order;
  for (std::size_t k = 0; k < tracks.size(); ++k) {
    const SampledTrack& tr = tracks[k];
    if (tr.size() != n || tr.t0 != t0 || tr.dt != dt)
      throw std::invalid_argument("assemble_matrices: inconsistent grids");
    for (std::size_t i = 0; i < n; ++i) {
      lat(static_cast<Index>(i), static_cast<Index>(k)) = tr.lat_series[i];
      lon(static_cast<Index>(i), static_cast<Index>(k)) = tr.lon_series[i];
      bits(static_cast<Index>(i), static_cast<Index>(k)) =
          tr.observed[i] ? 1.0 : 0.0;
    }
    order.push_back(tr.user_id);
  }
  return TrackMatrixPair{std::move(lat), std::move(lon),
                         ObservationMask(std::move(bits)), std::move(order),
                         t0, dt};
}

inline std::vector<SampledTrack> disassemble(const TrackMatrixPair& pair) {
  const Index n = pair.lat_mat.rows(), k_count = pair.lat_mat.cols();
  if (pair.lon_mat.rows() != n || pair.lon_mat.cols() != k_count ||
      pair.mask.rows() != n || pair.mask.cols() != k_count)
    throw std::invalid_argument("disassemble: inconsistent shapes");
  std::vector<SampledTrack> tracks(static_cast<std::size_t>(k_count));
  for (Index k = 0; k < k_count; ++k) {
    SampledTrack& tr = tracks[static_cast<std::size_t>(k)];
    tr.user_id = k < static_cast<Index>(pair.user_order.size())
                     ? pair.user_order[static_cast<std::size_t>(k)]
                     : std::string();
    tr.t0 = pair.t0;
    tr.dt = pair.dt;
    tr.lat_series.resize(static_cast<std::size_t>(n));
    tr.lon_series.resize(static_cast<std::size_t>(n));
    tr.observed.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      tr.lat_series[static_cast<std::size_t>(i)] = pair.lat_mat(i, k);
      tr.lon_series[static_cast<std::size_t>(i)] = pair.lon_mat(i, k);
      tr.observed[static_cast<std::size_t>(i)] =
          pair.mask.bits()(i, k) != 0.0 ? 1 : 0;
    }
  }
  return tracks;
}

/// Aggregate RSE over the stacked [lat; lon] matrices plus one RSE per user
/// column pair.
inline TrackRse track_rse(const TrackMatrixPair& recovered,
                          const TrackMatrixPair& truth) {
  require_same_shape(recovered.lat_mat, truth.lat_mat, "track_rse");
  require_same_shape(recovered.lon_mat, truth.lon_mat, "track_rse");
  TrackRse out;
  double num_sq = 0.0, den_sq = 0.0;
  for (Index k = 0; k < truth.lat_mat.cols(); ++k) {
    const double col_num =
        (truth.lat_mat.col(k) - recovered.lat_mat.col(k)).squaredNorm() +
        (truth.lon_mat.col(k) - recovered.lon_mat.col(k)).squaredNorm();
    const double col_den = truth.lat_mat.col(k).squaredNorm() +
                           truth.lon_mat.col(k).squaredNorm();
    if (col_den == 0.0)
      throw std::domain_error("track_rse: zero-norm truth column");
    out.per_user.push_back(std::sqrt(col_num / col_den));
    num_sq += col_num;
    den_sq += col_den;
  }
  if (den_sq == 0.0) throw std::domain_error("track_rse: zero-norm truth");
  out.aggregate = std::sqrt(num_sq / den_sq);
  return out;
}

/// Desk-scale stand-in for real traces: every user's coordinates are mixtures
/// of the same `rank` low-frequency sinusoids, so the assembled matrices have
/// rank at most `rank`.
inline TrackMatrixPair synthetic_smooth_tracks(std::size_t n,
                                               std::size_t users, Index rank,
                                               Seed seed, double t0 = 0.0,
                                               double dt = 5.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  std::normal_distribution<double> weight(0.0, 1.0);
  Matrix basis(static_cast<Index>(n), rank);
  for (Index j = 0; j < rank; ++j) {
    const double ph = phase(rng);
    for (std::size_t i = 0; i < n; ++i)
      basis(static_cast<Index>(i), j) =
          std::sin(2.0 * M_PI * static_cast<double>(j + 1) *
                       static_cast<double>(i) / static_cast<double>(n) +
                   ph);
  }
  Matrix wlat(rank, static_cast<Index>(users));
  Matrix wlon(rank, static_cast<Index>(users));
  for (Index k = 0; k < static_cast<Index>(users); ++k)
    for (Index j = 0; j < rank; ++j) {
      wlat(j, k) = weight(rng);
      wlon(j, k) = weight(rng);
    }
  std::vector<std::string> order;
  for (std::size_t k = 0; k < users; ++k)
    order.push_back("user_" + std::to_string(k));
  return TrackMatrixPair{
      basis * wlat, basis * wlon,
      ObservationMask(static_cast<Index>(n), static_cast<Index>(users)),
      std::move(order), t0, dt};
}

}  // namespace ppmc

#endif  // PPMC_TRAJECTORY_HPP_
