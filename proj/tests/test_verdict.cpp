#include "blowup/verdict.hpp"

#include "doctest.h"

using namespace blowup;

namespace {

using K = OperatorKind;

// Evidence with the radial and first-harmonic pattern of a favourable dimension.
SpectralEvidence favourable() {
  SpectralEvidence ev;
  ev.dim = 7;
  ev.index = {{{0, K::L1}, 2}, {{1, K::L1}, 1}, {{2, K::L1}, 0}, {{0, K::L2}, 1}, {{1, K::L2}, 0}};
  ev.k11 = -1.0;
  ev.k22 = -2.0;
  ev.kk = 1.5;
  ev.jj = -3.0;
  ev.l2z = -4.0;
  ev.k11_1 = -5.0;
  ev.j11_1 = 6.0;
  return ev;
}

}  // namespace

TEST_CASE("favourable evidence holds in general") {
  const auto v = assemble_verdict(favourable());
  CHECK(v.property1.verdict == Verdict::HoldsGeneral);
  CHECK(v.property2.verdict == Verdict::HoldsGeneral);
  CHECK(v.property1.missing.empty());
}

TEST_CASE("second harmonic with a negative direction leaves only the radial statement") {
  auto ev = favourable();
  ev.index[{2, K::L1}] = 1;
  ev.index[{3, K::L1}] = 0;
  ev.k11_2 = 5e13;
  const auto v = assemble_verdict(ev);
  CHECK(v.property1.verdict == Verdict::HoldsRadialOnly);
  CHECK(v.property2.verdict == Verdict::HoldsRadialOnly);
}

TEST_CASE("first harmonic of L2 with index 1 needs a negative form") {
  auto ev = favourable();
  ev.index[{1, K::L2}] = 1;
  ev.index[{2, K::L2}] = 0;
  ev.j11_1 = -1.0;
  CHECK(assemble_verdict(ev).property1.verdict == Verdict::HoldsGeneral);
  ev.j11_1 = 1.0;
  CHECK(assemble_verdict(ev).property1.verdict == Verdict::HoldsRadialOnly);
}

TEST_CASE("radial sign failures are indecisive") {
  auto ev = favourable();
  ev.kk = -1.0;
  CHECK(assemble_verdict(ev).property1.verdict == Verdict::Indecisive);
  ev = favourable();
  ev.jj = 1.0;
  const auto v = assemble_verdict(ev);
  CHECK(v.property1.verdict == Verdict::Indecisive);
  CHECK(v.property2.verdict == Verdict::HoldsGeneral);
  ev = favourable();
  ev.l2z = 1.0;
  CHECK(assemble_verdict(ev).property2.verdict == Verdict::Indecisive);
  ev = favourable();
  ev.index[{0, K::L1}] = 3;
  CHECK(assemble_verdict(ev).property1.verdict == Verdict::Indecisive);
}

TEST_CASE("smaller radial indices need fewer forms") {
  auto ev = favourable();
  ev.index[{0, K::L1}] = 1;
  ev.k22.reset();
  ev.kk.reset();
  CHECK(assemble_verdict(ev).property1.verdict == Verdict::HoldsGeneral);
  ev.index[{0, K::L1}] = 0;
  ev.k11.reset();
  CHECK(assemble_verdict(ev).property1.verdict == Verdict::HoldsGeneral);
}

TEST_CASE("missing evidence is incomplete") {
  auto ev = favourable();
  ev.index.erase({0, K::L2});
  auto v = assemble_verdict(ev);
  CHECK(v.property1.verdict == Verdict::Incomplete);
  CHECK_FALSE(v.property1.missing.empty());
  ev = favourable();
  ev.index.erase({2, K::L1});
  CHECK(assemble_verdict(ev).property1.verdict == Verdict::Incomplete);
  ev = favourable();
  ev.k11_1.reset();
  CHECK(assemble_verdict(ev).property1.verdict == Verdict::Incomplete);
  ev = favourable();
  ev.k22.reset();
  CHECK(assemble_verdict(ev).property1.verdict == Verdict::Incomplete);
}

TEST_CASE("radial failure takes precedence over missing non-radial data") {
  auto ev = favourable();
  ev.k11 = 1.0;
  ev.index.erase({1, K::L2});
  CHECK(assemble_verdict(ev).property1.verdict == Verdict::Indecisive);
}

TEST_CASE("verdict names") {
  CHECK(to_string(Verdict::HoldsGeneral) == "holds-general");
  CHECK(to_string(Verdict::HoldsRadialOnly) == "holds-radial-only");
  CHECK(to_string(Verdict::Indecisive) == "indecisive");
  CHECK(to_string(Verdict::Incomplete) == "incomplete");
}
