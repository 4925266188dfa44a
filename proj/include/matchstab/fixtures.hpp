#pragma once

#include <optional>
#include <vector>

#include "matchstab/model.hpp"

namespace matchstab {

struct PriorityMatrices;

/// A parsed model: structure, optionally a measure, optionally priority
/// matrices for the priority policy.
struct Model {
  StructurePtr structure;
  std::optional<ArrivalMeasure> measure;
  std::optional<std::pair<std::vector<std::vector<int>>,
                          std::vector<std::vector<int>>>> priorities;  // (A, B)
};

// Canonical fixtures. "NN": C={1,2,3}, S={1',2',3'},
// E={(1,2'),(1,3'),(2,1'),(2,2'),(3,1')}. "NNN": C={1..4}, S={1'..4'},
// E={(1,1'),(1,2'),(2,2'),(2,3'),(3,3'),(3,4'),(4,4')}.
StructurePtr nn_structure();                       // F = C x S
StructurePtr nn_structure_with_arrivals(const std::vector<std::pair<int, int>>& f);
StructurePtr nn_fdiag_structure();                 // F = {(1,1'),(2,2'),(3,3')}
StructurePtr nn_fanti_structure();                 // F = {(1,3'),(2,2'),(3,1')}
StructurePtr nnn_structure();                      // F = C x S

/// Symmetric product measure on a 3x3 structure: mu_C = mu_S = (x, y, 1-x-y).
ArrivalMeasure symmetric_product_measure(const StructurePtr& structure,
                                         const Rational& x, const Rational& y);

Model nn_model();          // mu = (2/5,2/5,1/5)^2, default priorities
Model nn_priority_model(); // mu = (1/3,2/5,4/15)^2 with the priority matrices
                           // A = B = [[0,2,1],[2,1,0],[1,0,0]]
Model nn_fdiag_model();    // mu = 2/5,2/5,1/5 on the diagonal
Model nn_fanti_model();    // mu uniform on the anti-diagonal
Model nnn_model();         // mu = (3/10,1/4,1/4,1/5) x (1/5,1/4,1/4,3/10)

std::vector<std::vector<int>> nn_default_priority_a();
std::vector<std::vector<int>> nn_default_priority_b();
std::vector<std::vector<int>> nnn_default_priority_a();
std::vector<std::vector<int>> nnn_default_priority_b();

}  // namespace matchstab
