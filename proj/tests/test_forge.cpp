#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "faceforge/forge.hpp"
#include "faceforge/png_io.hpp"
#include "faceforge/records.hpp"
#include "faceforge/rng.hpp"
#include "support.hpp"

using namespace faceforge;
using fftest::error_kind;
using fftest::max_abs_diff;

namespace {

PairInputs fixture_pair(const std::string& id) {
  for (const PairRecord& r : read_pairs_file(fftest::fixture_corpus() / "pairs.jsonl"))
    if (r.pair_id == id) return load_pair(r);
  FAIL("fixture pair missing: " << id);
  return {};
}

Image quantized(const Image& img) {
  Image q = img;
  for (float& v : q.data()) v = static_cast<float>(static_cast<int>(v * 255.0f + 0.5f)) / 255.0f;
  return q;
}

bool oracle_drop(std::pair<double, double> real, std::pair<double, double> synth, double t) {
  return std::max(real.first - synth.first, real.second - synth.second) > t;
}

std::vector<std::string> vanilla_paths(std::size_t n) {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back("/data/vanilla/" + std::to_string(i) + ".png");
  return v;
}

std::vector<Triplet> cycle_pool(std::size_t pairs) {
  std::vector<Triplet> pool;
  for (std::size_t i = 0; i < pairs; ++i) {
    const std::string id = "p" + std::to_string(i);
    const TripletPair naive{
        Triplet{id, TripletKind::naive, {"/r/" + id + "a.png", false}, {"/r/" + id + "b.png", false}, {id + "/c_ab.png", true}},
        Triplet{id, TripletKind::naive, {"/r/" + id + "b.png", false}, {"/r/" + id + "a.png", false}, {id + "/c_ba.png", true}}};
    const TripletPair cyc = rotate_to_cycle(naive);
    pool.push_back(cyc.first);
    pool.push_back(cyc.second);
  }
  return pool;
}

}  // namespace

TEST_CASE("SplitMix64 reference stream") {
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFull);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ull);
  SplitMix64 b(42);
  for (int i = 0; i < 1000; ++i) CHECK(b.below(7) < 7);
}

TEST_CASE("synthesis reduces to identity on degenerate inputs") {
  const PairInputs p = fixture_pair("pair01");
  const auto& r = p.rasters;
  const SwapResult same = synthesize_swap(r.c_a, r.c_a, r.face_mask_a, r.face_mask_a, r.face_mask_a);
  CHECK(max_abs_diff(same.swapped, r.c_a) <= 1e-5);
  const SwapResult empty = synthesize_swap(r.c_a, r.r_ab, Mask(64, 64), r.face_mask_a, r.face_mask_a);
  CHECK(max_abs_diff(empty.swapped, r.c_a) <= 1e-5);
  CHECK(empty.inpaint.filled_pixels == 0);
}

TEST_CASE("fixture synthesis matches the frozen golden") {
  const PairInputs p = fixture_pair("pair01");
  const NaiveBuild b = build_naive_triplets(p, {}, default_synthetic_paths(p.pair_id));
  const auto golden = std::filesystem::path(FF_FIXTURE_DIR) / "golden";
  CHECK(quantized(b.ab.swapped) == read_image_png(golden / "pair01_c_ab.png"));
  CHECK(quantized(b.ba.swapped) == read_image_png(golden / "pair01_c_ba.png"));
  CHECK(b.ab.inpaint.filled_pixels > 0);
  CHECK(b.ab.inpaint.converged);
  // Repeat runs are bit-identical.
  CHECK(build_naive_triplets(p, {}, default_synthetic_paths(p.pair_id)).ab.swapped == b.ab.swapped);
}

TEST_CASE("naive triplets follow the naive routing rows") {
  const PairInputs p = fixture_pair("pair02");
  const NaiveBuild b = build_naive_triplets(p, {}, default_synthetic_paths(p.pair_id));
  const auto& [t1, t2] = b.triplets;
  CHECK(t1.kind == TripletKind::naive);
  CHECK(t1.target == ImageRef{p.paths.c_a, false});
  CHECK(t1.source == ImageRef{p.paths.c_b, false});
  CHECK(t1.reference == ImageRef{"pair02/c_ab.png", true});
  CHECK(t2.target == ImageRef{p.paths.c_b, false});
  CHECK(t2.source == ImageRef{p.paths.c_a, false});
  CHECK(t2.reference == ImageRef{"pair02/c_ba.png", true});
  CHECK(t1.reference.synthetic);
  CHECK(t2.reference.synthetic);
}

TEST_CASE("self pair reproduces its inputs") {
  PairInputs p = fixture_pair("pair03");
  auto& r = p.rasters;
  r.c_b = r.c_a;
  r.r_ab = r.c_a;
  r.r_ba = r.c_a;
  r.face_mask_b = r.face_mask_rab = r.face_mask_rba = r.face_mask_a;
  const NaiveBuild b = build_naive_triplets(p, {}, default_synthetic_paths(p.pair_id));
  CHECK(max_abs_diff(b.ab.swapped, r.c_a) <= 1e-5);
  CHECK(max_abs_diff(b.ba.swapped, r.c_b) <= 1e-5);
}

TEST_CASE("pair validation") {
  PairInputs p = fixture_pair("pair01");
  p.rasters.face_mask_rba = Mask(32, 64);
  CHECK(error_kind([&] { validate(p); }) == ErrorKind::geometry);
}

TEST_CASE("rotation yields the cycle routing rows") {
  const TripletPair naive{Triplet{"x", TripletKind::naive, {"Ca", false}, {"Cb", false}, {"Cab", true}},
                          Triplet{"x", TripletKind::naive, {"Cb", false}, {"Ca", false}, {"Cba", true}}};
  const auto [c1, c2] = rotate_to_cycle(naive);
  CHECK(c1 == Triplet{"x", TripletKind::cycle, {"Cab", true}, {"Cba", true}, {"Ca", false}});
  CHECK(c2 == Triplet{"x", TripletKind::cycle, {"Cba", true}, {"Cab", true}, {"Cb", false}});

  const std::multiset<std::string> before{"Ca", "Cb", "Cab", "Cba"};
  const std::multiset<std::string> after{c1.target.path, c1.source.path, c1.reference.path, c2.reference.path};
  CHECK(before == after);
  const std::set<std::string> all{c1.target.path, c1.source.path, c1.reference.path,
                                  c2.target.path, c2.source.path, c2.reference.path};
  CHECK(all == std::set<std::string>(before.begin(), before.end()));

  CHECK(rotate_to_cycle(rotate_to_cycle(naive)) == naive);

  TripletPair mixed = naive;
  mixed.second.pair_id = "y";
  CHECK(error_kind([&] { rotate_to_cycle(mixed); }) == ErrorKind::pairing);
  mixed = naive;
  mixed.second.kind = TripletKind::cycle;
  CHECK(error_kind([&] { rotate_to_cycle(mixed); }) == ErrorKind::pairing);
}

TEST_CASE("IQA gate examples") {
  CHECK(iqa_gate({0.9, 0.9}, {0.6, 0.8}, 0.4) == IqaDecision::keep);
  CHECK(iqa_gate({0.9, 0.9}, {0.4, 0.8}, 0.4) == IqaDecision::drop);
  CHECK(iqa_gate({0.9, 0.9}, {0.4, 0.8}) == IqaDecision::drop);
  for (double t : {1e-9, 0.1, 0.4, 0.99}) CHECK(iqa_gate({0.7, 0.2}, {0.7, 0.2}, t) == IqaDecision::keep);
  CHECK(iqa_gate({0.75, 0.5}, {0.25, 0.5}, 0.5) == IqaDecision::keep);  // a drop equal to the threshold is kept
  CHECK(error_kind([] { iqa_gate({1.1, 0.5}, {0.5, 0.5}); }) == ErrorKind::validation);
  CHECK(error_kind([] { iqa_gate({0.5, 0.5}, {0.5, -0.01}); }) == ErrorKind::validation);
}

TEST_CASE("IQA gate agrees with the oracle and is monotone in the threshold") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const std::pair<double, double> real{u(rng), u(rng)}, synth{u(rng), u(rng)};
    const double t = u(rng);
    CHECK((iqa_gate(real, synth, t) == IqaDecision::drop) == oracle_drop(real, synth, t));
    if (iqa_gate(real, synth, t) == IqaDecision::keep) CHECK(iqa_gate(real, synth, t + 0.1) == IqaDecision::keep);
  }
}

TEST_CASE("manifest mixing counts") {
  const auto vanilla = vanilla_paths(1000);
  const auto pool = cycle_pool(300);
  const ManifestBuild m = build_manifest(vanilla, pool, {0.4, 0.3, 7});
  std::size_t recon = 0, swap = 0, cycle = 0;
  for (const ManifestRow& row : m.rows) {
    CHECK(routing_violations(row).empty());
    if (row.kind == ManifestKind::vanilla_recon) ++recon;
    if (row.kind == ManifestKind::vanilla_swap) {
      ++swap;
      CHECK(row.source != row.target);
    }
    if (row.kind == ManifestKind::cycle) ++cycle;
  }
  CHECK(cycle == 400);
  CHECK(recon == 300);
  CHECK(swap == 700);
  CHECK(m.warnings.empty());

  const ManifestBuild none = build_manifest(vanilla, pool, {0.4, 0.0, 7});
  CHECK(std::none_of(none.rows.begin(), none.rows.end(),
                     [](const ManifestRow& r) { return r.kind == ManifestKind::vanilla_recon; }));

  const ManifestBuild again = build_manifest(vanilla, pool, {0.4, 0.3, 7});
  CHECK(again.rows == m.rows);
  const ManifestBuild other = build_manifest(vanilla, pool, {0.4, 0.3, 8});
  CHECK(other.rows != m.rows);
}

TEST_CASE("manifest with short cycle supply warns and uses all") {
  const ManifestBuild m = build_manifest(vanilla_paths(100), cycle_pool(5), {0.4, 0.3, 1});
  CHECK(m.warnings.size() == 1);
  CHECK(std::count_if(m.rows.begin(), m.rows.end(), [](const ManifestRow& r) { return r.kind == ManifestKind::cycle; }) ==
        10);
}

TEST_CASE("manifest errors") {
  const std::vector<std::string> empty;
  CHECK(error_kind([&] { build_manifest(empty, {}, {}); }) == ErrorKind::validation);
  const auto v = vanilla_paths(3);
  CHECK(error_kind([&] { build_manifest(v, {}, {-0.1, 0.3, 0}); }) == ErrorKind::validation);
  CHECK(error_kind([&] { build_manifest(v, {}, {0.4, 1.5, 0}); }) == ErrorKind::validation);
  const std::vector<Triplet> naive{Triplet{"x", TripletKind::naive, {}, {}, {}}};
  CHECK(error_kind([&] { build_manifest(v, naive, {}); }) == ErrorKind::validation);
}

TEST_CASE("routing violations") {
  ManifestRow cyc{ManifestKind::cycle, "t", "s", "r", "p", true, true, true};
  auto v = routing_violations(cyc);
  REQUIRE(v.size() == 1);
  CHECK(v[0] == "cycle reference must be real");
  ManifestRow swap{ManifestKind::vanilla_swap, "t", "s", "r", "p"};
  v = routing_violations(swap);
  REQUIRE(v.size() == 1);
  CHECK(v[0] == "vanilla_swap row must not carry a reference");
  ManifestRow recon{ManifestKind::vanilla_recon, "t", "t", "x", "p"};
  CHECK(routing_violations(recon).size() == 1);
  recon.reference = "t";
  CHECK(routing_violations(recon).empty());
  CHECK(parse_manifest_kind("cycle") == ManifestKind::cycle);
  CHECK_FALSE(parse_manifest_kind("naive"));
  CHECK(to_string(ManifestKind::vanilla_swap) == "vanilla_swap");
}
