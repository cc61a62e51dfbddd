#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "gst/circuit.hpp"
#include "gst/dataset.hpp"
#include "gst/simulate.hpp"
#include "gst/superop.hpp"
#include "gst/util.hpp"

using namespace gst;

TEST_CASE("circuit text round trip preserves powers and grouping") {
  for (const char* text : {"rho0:(Gx Gy)^8 Gx:M0", "rho0:{}:M0", "rho1:Gx^4:M2",
                           "rho0:Gi Gx Gy:M0", "rho0:(Gx Gy Gy)^3:M0"}) {
    Circuit c = Circuit::parse(text);
    CHECK(c.text() == text);
    CHECK(Circuit::parse(c.text()) == c);
  }
}

TEST_CASE("circuit parse accepts bare middles and defaults indices to zero") {
  Circuit c = Circuit::parse("Gx Gy");
  CHECK(c.prep_index() == 0);
  CHECK(c.povm_index() == 0);
  CHECK(c.expanded_labels() == Fragment{"Gx", "Gy"});
  CHECK(c.text() == "rho0:Gx Gy:M0");

  Circuit empty = Circuit::parse("{}");
  CHECK(empty.depth() == 0);

  Circuit adj = Circuit::parse("GxGy");  // labels are G + lowercase run
  CHECK(adj.expanded_labels() == Fragment{"Gx", "Gy"});
}

TEST_CASE("circuit depth counts expanded layers") {
  Circuit c = Circuit::parse("rho0:(Gx Gy)^8 Gx:M0");
  CHECK(c.depth() == 17);
  CHECK(c.expanded_labels().size() == 17);
}

TEST_CASE("compose: empty circuit gives the identity") {
  GateSet gs = standard_xyi_gateset();
  CHECK((compose(Circuit(), gs) - TransferMatrix::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("compose multiplies in reverse chronological order") {
  GateSet gs = standard_xyi_gateset();
  Circuit c = Circuit::from_labels({"Gx", "Gy"});
  TransferMatrix want = gs.gate("Gy") * gs.gate("Gx");
  CHECK((compose(c, gs) - want).norm() < 1e-14);
}

TEST_CASE("compose: X(pi/2)^4 is the identity and powers factor") {
  GateSet gs = standard_xyi_gateset();
  Circuit c = Circuit::parse("Gx^4");
  CHECK((compose(c, gs) - TransferMatrix::Identity(4, 4)).norm() < 1e-12);

  Circuit c2 = Circuit::parse("(Gx Gy)^5");
  TransferMatrix base = gs.gate("Gy") * gs.gate("Gx");
  TransferMatrix want = base * base * base * base * base;
  CHECK((compose(c2, gs) - want).norm() < 1e-12);
}

TEST_CASE("compose concatenation property on random circuits") {
  GateSet gs = standard_xyi_gateset();
  SplitMix64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Fragment a, b;
    for (int i = 0; i < 4; ++i) {
      a.push_back(gs.gate_label(static_cast<int>(rng.uniform() * 3)));
      b.push_back(gs.gate_label(static_cast<int>(rng.uniform() * 3)));
    }
    Circuit ca = Circuit::from_labels(a), cb = Circuit::from_labels(b);
    TransferMatrix joint = compose(ca.then(cb), gs);
    CHECK((joint - compose(cb, gs) * compose(ca, gs)).norm() < 1e-12);
  }
}

TEST_CASE("compose names missing gates") {
  GateSet gs = standard_xyi_gateset();
  try {
    compose(Circuit::from_labels({"Gz"}), gs);
    FAIL("expected MissingGateError");
  } catch (const MissingGateError& e) {
    CHECK(std::string(e.what()).find("Gz") != std::string::npos);
  }
}

TEST_CASE("probabilities of reference circuits") {
  GateSet gs = standard_xyi_gateset();
  auto p0 = probabilities(gs, Circuit());
  CHECK(std::abs(p0[0] - 1.0) < 1e-12);
  CHECK(std::abs(p0[1]) < 1e-12);

  auto p1 = probabilities(gs, Circuit::from_labels({"Gx"}));
  CHECK(std::abs(p1[0] - 0.5) < 1e-12);
  CHECK(std::abs(p1[1] - 0.5) < 1e-12);
  // matrix oracle
  TransferMatrix g = gs.gate("Gx");
  double want = gs.povm(0)[0].dot((g * gs.prep(0)).transpose());
  CHECK(std::abs(p1[0] - want) < 1e-14);

  auto p2 = probabilities(gs, Circuit::from_labels({"Gx", "Gx"}));
  CHECK(std::abs(p2[0]) < 1e-12);
  CHECK(std::abs(p2[1] - 1.0) < 1e-12);
}

TEST_CASE("probabilities sum to one for TP gate sets") {
  GateSet gs = standard_xyi_gateset();
  SplitMix64 rng(7);
  for (int k = 0; k < 3; ++k) gs.gate(k) = depolarizing(0.02) * gs.gate(k);
  for (int trial = 0; trial < 25; ++trial) {
    Fragment labels;
    for (int i = 0; i < 6; ++i) labels.push_back(gs.gate_label(static_cast<int>(rng.uniform() * 3)));
    auto p = probabilities(gs, Circuit::from_labels(labels));
    CHECK(std::abs(p[0] + p[1] - 1.0) < 1e-10);
  }
}

TEST_CASE("simulate: deterministic circuit gives all counts in one bucket") {
  GateSet gs = standard_xyi_gateset();
  DataSet ds = simulate(gs, {Circuit()}, 500, 99);
  CHECK(ds.row(0).counts[0] == 500.0);
  CHECK(ds.row(0).counts[1] == 0.0);
}

TEST_CASE("simulate: p=1/2 frequency lands within 5 sigma at N=1e6") {
  GateSet gs = standard_xyi_gateset();
  DataSet ds = simulate(gs, {Circuit::from_labels({"Gx"})}, 1000000, 1234);
  double f = ds.row(0).counts[0] / ds.row(0).total;
  // binomial std at p=1/2, N=1e6 is 5e-4
  CHECK(std::abs(f - 0.5) < 0.0025);
}

TEST_CASE("simulate is deterministic: same seed gives byte-identical text") {
  GateSet gs = standard_xyi_gateset();
  std::vector<Circuit> circuits = {Circuit::from_labels({"Gx"}), Circuit::from_labels({"Gy", "Gx"})};
  DataSet a = simulate(gs, circuits, 1000, 42, 1);
  DataSet b = simulate(gs, circuits, 1000, 42, 2);  // different job count
  CHECK(a.to_text() == b.to_text());
  DataSet c = simulate(gs, circuits, 1000, 43);
  CHECK(a.to_text() != c.to_text());
}

TEST_CASE("simulate rejects strongly negative probabilities") {
  GateSet gs = standard_xyi_gateset();
  gs.gate(1) = TransferMatrix::Identity(4, 4) * 1.8;  // wildly nonphysical
  gs.gate(1).row(0) << 1, 0, 0, 0;
  bool threw = false;
  try {
    simulate(gs, {Circuit::from_labels({"Gx", "Gx", "Gx"})}, 10, 1);
  } catch (const SimulationDomainError&) {
    threw = true;
  }
  CHECK(threw);
}

TEST_CASE("simulation frequencies converge to probabilities") {
  GateSet gs = standard_xyi_gateset();
  SplitMix64 rng(11);
  std::vector<Circuit> circuits;
  for (int i = 0; i < 40; ++i) {
    Fragment labels;
    for (int l = 0; l < 3; ++l) labels.push_back(gs.gate_label(static_cast<int>(rng.uniform() * 3)));
    Circuit c = Circuit::from_labels(labels);
    if (std::none_of(circuits.begin(), circuits.end(), [&](const Circuit& x) { return x == c; }))
      circuits.push_back(c);
  }
  const long N = 4000;
  DataSet ds = simulate(gs, circuits, N, 2024);
  int ok = 0, checked = 0;
  for (std::size_t i = 0; i < circuits.size(); ++i) {
    auto p = probabilities(gs, circuits[i]);
    for (int b = 0; b < 2; ++b) {
      double sigma = std::sqrt(std::max(p[b] * (1 - p[b]), 1e-12) / N);
      ++checked;
      if (std::abs(ds.row(i).counts[b] / ds.row(i).total - p[b]) < 5 * sigma + 1e-9) ++ok;
    }
  }
  CHECK(ok >= checked * 99 / 100);
}

TEST_CASE("dataset text round trip is lossless and canonical") {
  GateSet gs = standard_xyi_gateset();
  std::vector<Circuit> circuits = {Circuit::parse("rho0:(Gx Gy)^8 Gx:M0"), Circuit::from_labels({"Gy"}),
                                   Circuit()};
  DataSet ds = simulate(gs, circuits, 250, 7);
  DataSet back = DataSet::from_text(ds.to_text());
  CHECK(back.size() == ds.size());
  CHECK(back.seed == ds.seed);
  CHECK(back.gateset_hash == ds.gateset_hash);
  CHECK(back.to_text() == ds.to_text());

  DataSet js = DataSet::from_json(ds.to_json());
  CHECK(js.to_text() == ds.to_text());
}

TEST_CASE("dataset io round trips through files including exact (real-valued) data") {
  GateSet gs = standard_xyi_gateset();
  DataSet ds = exact_dataset(gs, {Circuit::from_labels({"Gx"})}, 1e6);
  std::string path = "test_dataset_tmp.txt";
  ds.write(path);
  DataSet back = DataSet::read(path);
  CHECK(std::abs(back.row(0).counts[0] - 5e5) < 1e-6);
  CHECK(back.to_text() == ds.to_text());
  std::remove(path.c_str());
}

TEST_CASE("dataset parser flags malformed lines with the line number") {
  auto expect_error = [](const std::string& body, int line) {
    try {
      DataSet::from_text(body);
      FAIL_CHECK("expected ParseError for: " << body);
    } catch (const ParseError& e) {
      CHECK(e.line_number == line);
    }
  };
  expect_error("rho0:Gx:M0  0:5 1:-3  total=2\n", 1);          // negative count
  expect_error("# header\nrho0:Gx:M0  0:5 1:3  total=9\n", 2);  // bad sum
  expect_error("rho0:Gx:M0  total=0\n", 1);                     // no counts
}
