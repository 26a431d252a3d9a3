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

#include "bivi/traffic.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace bivi {
namespace {

constexpr double kBprFactor = 0.15;

Matrix read_matrix(const nlohmann::json& j, const char* name, Index rows, Index cols) {
  if (!j.contains(name) || !j[name].is_array()) {
    throw ConfigError(std::string("network: missing array '") + name + "'");
  }
  const auto& a = j[name];
  if (static_cast<Index>(a.size()) != rows) {
    throw ConfigError(std::string("network: '") + name + "' has " +
                      std::to_string(a.size()) + " rows, expected " + std::to_string(rows));
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = a[i];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw ConfigError(std::string("network: '") + name + "' row " + std::to_string(i) +
                        " has " + std::to_string(row.is_array() ? row.size() : 0) +
                        " entries, expected " + std::to_string(cols));
    }
    for (Index c = 0; c < cols; ++c) m(i, c) = row[c].get<double>();
  }
  return m;
}

}  // namespace

void TrafficNetwork::validate() const {
  const Index na = num_arcs();
  if (na == 0) throw ConfigError("network: no arcs");
  if (delta.rows() != na) {
    throw ConfigError("network: delta has " + std::to_string(delta.rows()) +
                      " rows but there are " + std::to_string(na) + " arcs");
  }
  if (od_incidence.cols() != delta.cols()) {
    throw ConfigError("network: od_incidence and delta disagree on the path count");
  }
  if (demand.size() != od_incidence.rows()) {
    throw ConfigError("network: demand has " + std::to_string(demand.size()) +
                      " entries for " + std::to_string(od_incidence.rows()) + " OD pairs");
  }
  for (Index a = 0; a < na; ++a) {
    const Arc& arc = arcs[a];
    if (!(arc.t0 >= 0.0) || !(arc.cap > 0.0) || !(arc.n >= 1.0)) {
      throw ConfigError("network: arc " + std::to_string(a) +
                        " needs t0 >= 0, cap > 0 and n >= 1");
    }
  }
  auto binary = [](const Matrix& m, const char* name) {
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index c = 0; c < m.cols(); ++c) {
        if (m(i, c) != 0.0 && m(i, c) != 1.0) {
          throw ConfigError(std::string("network: ") + name + " row " + std::to_string(i) +
                            " has a non 0/1 entry in column " + std::to_string(c));
        }
      }
    }
  };
  binary(delta, "delta");
  binary(od_incidence, "od_incidence");
  for (Index p = 0; p < num_paths(); ++p) {
    if (delta.col(p).sum() < 1.0) {
      throw ConfigError("network: path " + std::to_string(p) +
                        " (delta column) uses no arc");
    }
    if (od_incidence.col(p).sum() != 1.0) {
      throw ConfigError("network: path " + std::to_string(p) +
                        " (od_incidence column) must belong to exactly one OD pair");
    }
  }
  if ((demand.array() < 0.0).any()) throw ConfigError("network: negative demand");
}

Vector TrafficNetwork::arc_usage() const { return delta.rowwise().sum(); }

Vector TrafficNetwork::arc_flows(const Vector& h) const {
  require_dim(h.size(), num_paths(), "path flows");
  return delta * h;
}

Vector TrafficNetwork::arc_costs(const Vector& h) const {
  const Vector v = arc_flows(h);
  Vector c(num_arcs());
  for (Index a = 0; a < num_arcs(); ++a) {
    const Arc& arc = arcs[a];
    c[a] = arc.t0 * (1.0 + kBprFactor * std::pow(v[a] / arc.cap, arc.n));
  }
  return c;
}

Vector TrafficNetwork::path_costs(const Vector& h) const {
  return delta.transpose() * arc_costs(h);
}

double TrafficNetwork::total_cost(const Vector& h) const {
  return arc_usage().dot(arc_costs(h));
}

Vector TrafficNetwork::total_cost_gradient(const Vector& h) const {
  const Vector v = arc_flows(h);
  const Vector usage = arc_usage();
  Vector weight(num_arcs());
  for (Index a = 0; a < num_arcs(); ++a) {
    const Arc& arc = arcs[a];
    const double slope = arc.n == 1.0
                             ? 1.0
                             : arc.n * std::pow(v[a] / arc.cap, arc.n - 1.0);
    weight[a] = usage[a] * arc.t0 * kBprFactor * slope / arc.cap;
  }
  return delta.transpose() * weight;
}

bool TrafficNetwork::all_linear() const {
  for (const Arc& a : arcs) {
    if (a.n != 1.0) return false;
  }
  return true;
}

bool operator==(const TrafficNetwork& a, const TrafficNetwork& b) {
  if (a.comment != b.comment || a.nodes != b.nodes || a.arcs.size() != b.arcs.size() ||
      a.od_pairs != b.od_pairs) {
    return false;
  }
  for (std::size_t i = 0; i < a.arcs.size(); ++i) {
    const Arc& x = a.arcs[i];
    const Arc& y = b.arcs[i];
    if (x.from != y.from || x.to != y.to || x.t0 != y.t0 || x.cap != y.cap || x.n != y.n) {
      return false;
    }
  }
  return a.demand == b.demand && a.delta == b.delta && a.od_incidence == b.od_incidence;
}

TrafficNetwork network_from_json(const nlohmann::json& j) {
  TrafficNetwork net;
  try {
    net.comment = j.value("comment", std::string());
    net.nodes = j.value("nodes", 0);
    if (!j.contains("arcs") || !j["arcs"].is_array()) {
      throw ConfigError("network: missing array 'arcs'");
    }
    for (const auto& a : j["arcs"]) {
      Arc arc;
      arc.from = a.value("from", 0);
      arc.to = a.value("to", 0);
      arc.t0 = a.at("t0").get<double>();
      arc.cap = a.at("cap").get<double>();
      arc.n = a.value("n", 1.0);
      net.arcs.push_back(arc);
    }
    if (j.contains("od_pairs")) {
      for (const auto& p : j["od_pairs"]) {
        net.od_pairs.emplace_back(p.at("origin").get<int>(), p.at("destination").get<int>());
      }
    }
    const auto& d = j.at("demand");
    net.demand.resize(static_cast<Index>(d.size()));
    for (Index i = 0; i < net.demand.size(); ++i) net.demand[i] = d[i].get<double>();

    const auto& delta = j.at("delta");
    const Index paths = delta.empty() ? 0 : static_cast<Index>(delta[0].size());
    net.delta = read_matrix(j, "delta", net.num_arcs(), paths);
    net.od_incidence = read_matrix(j, "od_incidence", net.demand.size(), paths);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("network: ") + e.what());
  }
  net.validate();
  return net;
}

nlohmann::json network_to_json(const TrafficNetwork& net) {
  nlohmann::json j;
  j["comment"] = net.comment;
  j["nodes"] = net.nodes;
  j["arcs"] = nlohmann::json::array();
  for (const Arc& a : net.arcs) {
    j["arcs"].push_back({{"from", a.from}, {"to", a.to}, {"t0", a.t0}, {"cap", a.cap}, {"n", a.n}});
  }
  j["od_pairs"] = nlohmann::json::array();
  for (const auto& [o, d] : net.od_pairs) {
    j["od_pairs"].push_back({{"origin", o}, {"destination", d}});
  }
  j["demand"] = std::vector<double>(net.demand.data(), net.demand.data() + net.demand.size());
  auto rows = [](const Matrix& m) {
    nlohmann::json out = nlohmann::json::array();
    for (Index i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Index c = 0; c < m.cols(); ++c) row.push_back(static_cast<int>(m(i, c)));
      out.push_back(row);
    }
    return out;
  };
  j["delta"] = rows(net.delta);
  j["od_incidence"] = rows(net.od_incidence);
  return j;
}

TrafficNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open network file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("network file " + path + ": " + e.what());
  }
  return network_from_json(j);
}

void save_network(const TrafficNetwork& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write network file " + path);
  out << network_to_json(net).dump(2) << '\n';
}

std::string default_network_path() {
  namespace fs = std::filesystem;
  const char* name = "nguyen_dupuis.json";
  if (const char* env = std::getenv("BIVI_DATA_DIR")) {
    const fs::path p = fs::path(env) / name;
    if (fs::exists(p)) return p.string();
  }
#ifdef BIVI_SOURCE_DATA_DIR
  {
    const fs::path p = fs::path(BIVI_SOURCE_DATA_DIR) / name;
    if (fs::exists(p)) return p.string();
  }
#endif
#ifdef BIVI_INSTALL_DATA_DIR
  {
    const fs::path p = fs::path(BIVI_INSTALL_DATA_DIR) / name;
    if (fs::exists(p)) return p.string();
  }
#endif
  throw ConfigError("default network file not found; set BIVI_DATA_DIR");
}

}  // namespace bivi
