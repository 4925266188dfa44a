#include "matchstab/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "matchstab/error.hpp"

namespace matchstab {
namespace {

using nlohmann::json;

std::vector<std::pair<std::string, std::string>> read_edge_array(
    const json& arr, const char* key) {
  std::vector<std::pair<std::string, std::string>> out;
  if (!arr.is_array())
    throw Error(Errc::ParseError, std::string(key) + " must be an array");
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
      throw Error(Errc::ParseError,
                  std::string(key) + " entries must be [customer, server]");
    out.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  }
  return out;
}

}  // namespace

Model read_model(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("bad JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(Errc::ParseError, "model must be an object");
  if (!doc.contains("customers") || !doc.contains("servers") ||
      !doc.contains("edges"))
    throw Error(Errc::ParseError, "model needs customers, servers and edges");

  std::vector<std::string> customers, servers;
  for (const auto& c : doc["customers"]) customers.push_back(c.get<std::string>());
  for (const auto& s : doc["servers"]) servers.push_back(s.get<std::string>());
  auto edges = read_edge_array(doc["edges"], "edges");

  // Parse mu first: the default arrival graph is its support.
  std::vector<std::pair<std::string, std::string>> mu_entries;  // (c|s, value)
  std::vector<std::pair<std::pair<std::string, std::string>, Rational>> mu;
  if (doc.contains("mu")) {
    if (!doc["mu"].is_object())
      throw Error(Errc::ParseError, "mu must map \"c|s\" keys to rationals");
    for (const auto& [key, value] : doc["mu"].items()) {
      auto bar = key.find('|');
      if (bar == std::string::npos)
        throw Error(Errc::ParseError, "mu key '" + key + "' is not \"c|s\"");
      if (!value.is_string())
        throw Error(Errc::ParseError, "mu values must be rational strings");
      mu.push_back({{key.substr(0, bar), key.substr(bar + 1)},
                    Rational::parse(value.get<std::string>())});
    }
  }

  std::vector<std::pair<std::string, std::string>> arrivals;
  if (doc.contains("arrival_edges")) {
    arrivals = read_edge_array(doc["arrival_edges"], "arrival_edges");
  } else {
    for (const auto& [pair, p] : mu)
      if (p.is_positive()) arrivals.push_back(pair);
  }
  if (arrivals.empty())
    throw Error(Errc::ParseError, "model needs arrival_edges or a mu table");

  Model model;
  model.structure =
      MatchingStructure::validate(customers, servers, edges, arrivals);

  if (!mu.empty()) {
    const auto& g = *model.structure;
    std::vector<Rational> table(g.customer_count() * g.server_count());
    for (const auto& [pair, p] : mu) {
      int c = g.customer_index(pair.first);
      int s = g.server_index(pair.second);
      table[c * g.server_count() + s] = p;
    }
    model.measure = ArrivalMeasure::validate(model.structure, std::move(table));
  }

  if (doc.contains("priorities")) {
    const auto& pr = doc["priorities"];
    if (!pr.is_object() || !pr.contains("A") || !pr.contains("B"))
      throw Error(Errc::ParseError, "priorities needs matrices A and B");
    auto read_matrix = [](const json& m) {
      std::vector<std::vector<int>> out;
      for (const auto& row : m) {
        out.emplace_back();
        for (const auto& v : row) out.back().push_back(v.get<int>());
      }
      return out;
    };
    model.priorities = {{read_matrix(pr["A"]), read_matrix(pr["B"])}};
  }
  return model;
}

Model read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::BadInput, "cannot open '" + path + "'");
  return read_model(in);
}

Model load_model(const std::string& name_or_path) {
  if (name_or_path == "nn") return nn_model();
  if (name_or_path == "nnn") return nnn_model();
  if (name_or_path == "nn-fdiag") return nn_fdiag_model();
  if (name_or_path == "nn-fanti") return nn_fanti_model();
  if (name_or_path == "nn-priority") return nn_priority_model();
  return read_model_file(name_or_path);
}

void write_model(std::ostream& out, const Model& model) {
  out << model_to_json(model);
}

std::string model_to_json(const Model& model) {
  const auto& g = *model.structure;
  json doc;
  doc["customers"] = g.customer_labels();
  doc["servers"] = g.server_labels();
  json edges = json::array();
  for (auto [c, s] : g.edges())
    edges.push_back({g.customer_labels()[c], g.server_labels()[s]});
  doc["edges"] = edges;
  json arrivals = json::array();
  for (auto [c, s] : g.arrivals())
    arrivals.push_back({g.customer_labels()[c], g.server_labels()[s]});
  doc["arrival_edges"] = arrivals;
  if (model.measure) {
    json mu = json::object();
    for (auto [c, s] : g.arrivals())
      mu[g.customer_labels()[c] + "|" + g.server_labels()[s]] =
          model.measure->at(c, s).to_string();
    doc["mu"] = mu;
  }
  if (model.priorities) {
    doc["priorities"] = {{"A", model.priorities->first},
                         {"B", model.priorities->second}};
  }
  return doc.dump(2) + "\n";
}

}  // namespace matchstab
