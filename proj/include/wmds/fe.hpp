#ifndef WMDS_FE_HPP
#define WMDS_FE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"

#include "wmds/series.hpp"

namespace wmds {

struct FitOptions {
  int truncation = 5;
  // Power of u in the common denominator u^shift B(u); negative means n - 1.
  int shift = -1;
  // Degree caps for A_r and B. The smallest solution under `bounds` is
  // searched first; the caps grow by one step at a time up to `max_bounds`.
  FitBounds bounds{2, 2};
  FitBounds max_bounds{6, 6};
};

// Slot of T_ij when the transition matrix depends only on 2i - j.
int transition_slot(int i, int j, int n);

struct TransitionFit {
  std::optional<TransitionMatrix> matrix;
  FitOutcome outcome;
  int instances = 0;
  std::vector<int> columns;  // deg m mod n over the training set, ascending

  nlohmann::json to_json() const;
};

// Joint fit of D(s,m) = (qu)^deg m sum_i T_ij D(2-s,m;i) over all training
// m, with one unknown per residue of 2i - j.
TransitionFit fit_T(SeriesEngine& S, const std::vector<PolyFq>& training, const FitOptions& opt = {});

// Column j on its own: n independent unknowns T_0j..T_{n-1}j, training m of
// degree = j (mod n) only.
FitOutcome fit_T_column(SeriesEngine& S, int j, const std::vector<PolyFq>& training, const FitOptions& opt = {});

bool depends_only_on_2i_minus_j(const TransitionMatrix& T);

// Evidence that T_ij depends only on 2i - j beyond the joint ansatz:
//  - each column fitted on its own (training m of that column only); when
//    the column is determined its entries must match `joint` there;
//  - the joint ansatz refitted with column j0 left out of training; when
//    determined it must reproduce `joint` and satisfy the D functional
//    equation on the validation m of column j0.
// Underdetermined systems are listed but prove nothing; the report fails
// when any determined fit disagrees, or when none is determined.
Report check_transition_structure(SeriesEngine& S, const TransitionMatrix& joint, const std::vector<PolyFq>& training,
                                  const std::vector<PolyFq>& validation, const FitOptions& opt = {});

// Exact rational-function identities for one m.
Report verify_feD(SeriesEngine& S, const PolyFq& m, const TransitionMatrix& T, int trunc);
Report verify_feE(SeriesEngine& S, const PolyFq& m, const TransitionMatrix& T, int trunc);

// `count` distinct monic polynomials of each degree 0..max_degree (all of
// them when fewer exist), drawn with mt19937_64(seed), in ascending order.
std::vector<PolyFq> sample_monic(const FqConfig& F, int max_degree, int count, std::uint64_t seed);

}  // namespace wmds

#endif  // WMDS_FE_HPP
