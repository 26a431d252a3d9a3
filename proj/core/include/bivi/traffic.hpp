// Copyright 2026 The bivi Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BIVI_TRAFFIC_HPP_
#define BIVI_TRAFFIC_HPP_

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bivi/common.hpp"

namespace bivi {

// BPR arc: c(v) = t0 (1 + 0.15 (v / cap)^n).
struct Arc {
  int from = 0;
  int to = 0;
  double t0 = 1.0;
  double cap = 1.0;
  double n = 1.0;
};

/// Path-based traffic network: arc-path incidence `delta` (arcs x paths),
/// OD-path incidence `od_incidence` (pairs x paths) and OD demands.
struct TrafficNetwork {
  std::string comment;
  int nodes = 0;
  std::vector<Arc> arcs;
  std::vector<std::pair<int, int>> od_pairs;
  Vector demand;
  Matrix delta;
  Matrix od_incidence;

  Index num_arcs() const { return static_cast<Index>(arcs.size()); }
  Index num_paths() const { return delta.cols(); }
  Index num_od() const { return od_incidence.rows(); }

  // Throws ConfigError naming the offending row or column.
  void validate() const;

  // Number of paths through each arc.
  Vector arc_usage() const;
  Vector arc_flows(const Vector& h) const;
  Vector arc_costs(const Vector& h) const;
  // C(h) = delta^T c(delta h)
  Vector path_costs(const Vector& h) const;
  // f(h) = sum_i C_i(h) = sum_a usage_a c_a(flow_a)
  double total_cost(const Vector& h) const;
  // grad f = sum_a usage_a c'_a(flow_a) delta_{a,:}
  Vector total_cost_gradient(const Vector& h) const;
  bool all_linear() const;

  friend bool operator==(const TrafficNetwork& a, const TrafficNetwork& b);
};

TrafficNetwork network_from_json(const nlohmann::json& j);
nlohmann::json network_to_json(const TrafficNetwork& net);
TrafficNetwork load_network(const std::string& path);
void save_network(const TrafficNetwork& net, const std::string& path);

/// The shipped Nguyen-Dupuis file: $BIVI_DATA_DIR if set, then the source
/// tree, then the install prefix.
std::string default_network_path();

}  // namespace bivi

#endif  // BIVI_TRAFFIC_HPP_
