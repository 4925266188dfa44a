#include "matchstab/fixtures.hpp"

#include "matchstab/error.hpp"

namespace matchstab {
namespace {

using LabelEdge = std::pair<std::string, std::string>;

std::vector<LabelEdge> nn_edge_labels() {
  return {{"1", "2'"}, {"1", "3'"}, {"2", "1'"}, {"2", "2'"}, {"3", "1'"}};
}

std::vector<LabelEdge> all_pairs(const std::vector<std::string>& cs,
                                 const std::vector<std::string>& ss) {
  std::vector<LabelEdge> out;
  for (const auto& c : cs)
    for (const auto& s : ss) out.emplace_back(c, s);
  return out;
}

const std::vector<std::string> kNnCustomers{"1", "2", "3"};
const std::vector<std::string> kNnServers{"1'", "2'", "3'"};
const std::vector<std::string> kNnnCustomers{"1", "2", "3", "4"};
const std::vector<std::string> kNnnServers{"1'", "2'", "3'", "4'"};

}  // namespace

StructurePtr nn_structure() {
  static StructurePtr cached = MatchingStructure::validate(
      kNnCustomers, kNnServers, nn_edge_labels(),
      all_pairs(kNnCustomers, kNnServers));
  return cached;
}

StructurePtr nn_structure_with_arrivals(const std::vector<std::pair<int, int>>& f) {
  std::vector<LabelEdge> arrivals;
  for (auto [c, s] : f)
    arrivals.emplace_back(kNnCustomers.at(c), kNnServers.at(s));
  return MatchingStructure::validate(kNnCustomers, kNnServers, nn_edge_labels(),
                                     arrivals);
}

StructurePtr nn_fdiag_structure() {
  static StructurePtr cached =
      nn_structure_with_arrivals({{0, 0}, {1, 1}, {2, 2}});
  return cached;
}

StructurePtr nn_fanti_structure() {
  static StructurePtr cached =
      nn_structure_with_arrivals({{0, 2}, {1, 1}, {2, 0}});
  return cached;
}

StructurePtr nnn_structure() {
  static StructurePtr cached = MatchingStructure::validate(
      kNnnCustomers, kNnnServers,
      {{"1", "1'"},
       {"1", "2'"},
       {"2", "2'"},
       {"2", "3'"},
       {"3", "3'"},
       {"3", "4'"},
       {"4", "4'"}},
      all_pairs(kNnnCustomers, kNnnServers));
  return cached;
}

ArrivalMeasure symmetric_product_measure(const StructurePtr& structure,
                                         const Rational& x, const Rational& y) {
  if (structure->customer_count() != 3 || structure->server_count() != 3)
    throw Error(Errc::BadInput, "symmetric family needs a 3x3 structure");
  Rational z = Rational(1) - x - y;
  std::vector<Rational> w{x, y, z};
  return product_measure(structure, w, w);
}

std::vector<std::vector<int>> nn_default_priority_a() {
  return {{0, 2, 1}, {2, 1, 0}, {1, 0, 0}};
}
std::vector<std::vector<int>> nn_default_priority_b() {
  return {{0, 2, 1}, {2, 1, 0}, {1, 0, 0}};
}
std::vector<std::vector<int>> nnn_default_priority_a() {
  return {{2, 1, 0, 0}, {0, 2, 1, 0}, {0, 0, 2, 1}, {0, 0, 0, 1}};
}
std::vector<std::vector<int>> nnn_default_priority_b() {
  return {{1, 2, 0, 0}, {0, 1, 2, 0}, {0, 0, 1, 2}, {0, 0, 0, 1}};
}

Model nn_model() {
  auto g = nn_structure();
  Rational a(2, 5), b(1, 5);
  std::vector<Rational> w{a, a, b};
  Model m;
  m.measure = product_measure(g, w, w);
  m.structure = m.measure->structure_ptr();
  m.priorities = {{nn_default_priority_a(), nn_default_priority_b()}};
  return m;
}

Model nn_priority_model() {
  auto g = nn_structure();
  std::vector<Rational> w{Rational(1, 3), Rational(2, 5), Rational(4, 15)};
  Model m;
  m.measure = product_measure(g, w, w);
  m.structure = m.measure->structure_ptr();
  m.priorities = {{nn_default_priority_a(), nn_default_priority_b()}};
  return m;
}

Model nn_fdiag_model() {
  auto g = nn_fdiag_structure();
  std::vector<Rational> table(9);
  table[0 * 3 + 0] = Rational(2, 5);
  table[1 * 3 + 1] = Rational(2, 5);
  table[2 * 3 + 2] = Rational(1, 5);
  Model m;
  m.structure = g;
  m.measure = ArrivalMeasure::validate(g, std::move(table));
  m.priorities = {{nn_default_priority_a(), nn_default_priority_b()}};
  return m;
}

Model nn_fanti_model() {
  auto g = nn_fanti_structure();
  std::vector<Rational> table(9);
  table[0 * 3 + 2] = Rational(1, 3);
  table[1 * 3 + 1] = Rational(1, 3);
  table[2 * 3 + 0] = Rational(1, 3);
  Model m;
  m.structure = g;
  m.measure = ArrivalMeasure::validate(g, std::move(table));
  m.priorities = {{nn_default_priority_a(), nn_default_priority_b()}};
  return m;
}

Model nnn_model() {
  auto g = nnn_structure();
  std::vector<Rational> mu_c{Rational(3, 10), Rational(1, 4), Rational(1, 4),
                             Rational(1, 5)};
  std::vector<Rational> mu_s{Rational(1, 5), Rational(1, 4), Rational(1, 4),
                             Rational(3, 10)};
  Model m;
  m.measure = product_measure(g, mu_c, mu_s);
  m.structure = m.measure->structure_ptr();
  m.priorities = {{nnn_default_priority_a(), nnn_default_priority_b()}};
  return m;
}

}  // namespace matchstab
