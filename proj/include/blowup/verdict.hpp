#pragma once

// Decision table turning indices and form signs into a verdict for each
// spectral property. Pure function of the evidence record.

#include "blowup/io.hpp"
#include "blowup/spectral_property.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace blowup {

enum class Verdict { HoldsGeneral, HoldsRadialOnly, Indecisive, Incomplete };
std::string to_string(Verdict v);

struct SpectralEvidence {
  int dim = 0;
  std::map<std::pair<int, OperatorKind>, int> index;  // (k, operator) -> zero count
  std::optional<double> k11, k22, kk, jj, l2z;        // radial forms
  std::optional<double> k11_1, j11_1, k11_2;          // harmonic forms
};

struct PropertyVerdict {
  Verdict verdict = Verdict::Incomplete;
  bool radial = false;   // radial evidence complete and favourable
  bool general = false;  // every non-radial channel settled
  std::vector<std::string> chain;
  std::vector<std::string> missing;
};

struct SpectralVerdict {
  PropertyVerdict property1;
  PropertyVerdict property2;
};

// Radial: ind L1 = 2 with K11, K22 < 0 and KK > 0 (or a smaller index with
// the matching signs); property 1 needs ind L2 <= 1 with JJ < 0, property 2
// ind L2 <= 1 with <L2 Z, Z> < 0.
// Non-radial, per operator, channels k = 1, 2, ... up to the first zero index:
// k = 1 may carry index 1 when its form (K11^(1) or J11^(1)) is negative,
// since x_i Q and Q_{x_i} are among the orthogonality conditions; k >= 2 has
// no orthogonality condition and must have index 0.
SpectralVerdict assemble_verdict(const SpectralEvidence& ev);

// Full per-dimension analysis: channels k = 0..3 (extended while the index
// stays positive) for both operators on a bounded pool, FD cross-check counts,
// radial and harmonic forms, the r0 = 6 positivity data, and the verdict.
struct ChannelReport {
  IndexResult ivp;
  FiniteDifferenceSpectrum fd;
};
struct SpectralReport {
  int dim = 0;
  std::vector<ChannelReport> channels;
  BilinearForms forms;
  double l2z = 0.0;
  HarmonicForms harmonic;
  PositivityEvidence table_positivity;
  SpectralEvidence evidence;
  SpectralVerdict verdict;
};
SpectralReport analyze_dimension(const GroundStateProfile& prof, unsigned workers = 0);

// <dir>/spectral_d<d>.json plus channels_d<d>.csv.
void export_spectral(const SpectralReport& rep, const std::string& dir);

Json to_json(const SpectralEvidence& ev);
Json to_json(const PropertyVerdict& v);

}  // namespace blowup
