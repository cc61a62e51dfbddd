#pragma once

#include "gst/fiducials.hpp"
#include "gst/germs.hpp"

namespace gst {

// Effective prep index b encodes (native prep r, prep fiducial f) as
// b = r * N_F + f; effective measurement index a encodes (POVM m, meas
// fiducial h) as a = m * N_H + h.  Outcomes are not part of a circuit key.
struct EffectiveLayout {
  int n_preps = 1;
  int n_prep_fiducials = 0;
  int n_povms = 1;
  int n_meas_fiducials = 0;

  int num_eff_preps() const { return n_preps * n_prep_fiducials; }
  int num_eff_meas() const { return n_povms * n_meas_fiducials; }
  int prep_r(int b) const { return b / n_prep_fiducials; }
  int prep_f(int b) const { return b % n_prep_fiducials; }
  int meas_m(int a) const { return a / n_meas_fiducials; }
  int meas_h(int a) const { return a % n_meas_fiducials; }
  int eff_prep(int r, int f) const { return r * n_prep_fiducials + f; }
  int eff_meas(int m, int h) const { return m * n_meas_fiducials + h; }
};

struct DesignCircuit {
  int eff_meas = -1;     // a
  int eff_prep = -1;     // b
  int germ = -1;         // i; -1 marks the LGST (fiducial-pair) block
  int depth_index = -1;  // j into max_depths
  int power = 0;         // p; 0 for the LGST block
  int base_depth = 0;    // |germ| * p, used by Truncate
  Circuit circuit;
};

class ExperimentDesign {
 public:
  FiducialSet fiducials;
  GermSet germs;
  std::vector<int> max_depths;
  EffectiveLayout layout;
  std::vector<DesignCircuit> circuits;
  // Per germ: kept (a, b) fiducial pairs; an empty list means all pairs.
  std::vector<std::vector<std::pair<int, int>>> kept_pairs;

  std::vector<Circuit> all_circuits() const;

  /// Circuit for fiducial pair (a, b) with `power` repetitions of germ i in
  /// the middle (germ < 0 gives the bare fiducial-pair circuit).
  Circuit sandwich(int a, int b, int germ, int power) const;

  /// Rows whose base circuit (germ power) has depth <= max_depth; the LGST
  /// block is always included.
  ExperimentDesign truncated(int max_depth) const;

  std::string to_json() const;
  static ExperimentDesign from_json(const std::string& text);
  void write(const std::string& path) const;
  static ExperimentDesign read(const std::string& path);
};

/// All (a, b, germ, depth) sandwiches with p = floor(l/|g|) >= 1 plus the
/// LGST block, deduplicated by physical circuit identity.
ExperimentDesign build_design(const GermSet& germs, const FiducialSet& fiducials,
                              const std::vector<int>& max_depths, const GateSet& target);

/// Logarithmically spaced depths 1, m, m^2, ..., <= max_depth.
std::vector<int> log_spaced_depths(int max_depth, int base = 2);

/// The LGST-only design: fiducial pairs plus every gate as a depth-1 germ.
ExperimentDesign lgst_design(const FiducialSet& fiducials, const GateSet& target);

/// Per-germ minimal fiducial-pair sets preserving the amplified-parameter
/// rank; the same pairs are kept at every power of a germ.
ExperimentDesign reduce_fiducial_pairs(const ExperimentDesign& design, const GateSet& target,
                                       const Parameterization& param, const GermOptions& options = {});

}  // namespace gst
