#include "airsig/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <set>

#include "airsig/errors.hpp"
#include "airsig/rng.hpp"
#include "doctest.h"

using namespace airsig;
using namespace airsig::eval;

namespace {

Manifest toy_manifest(int signers, int genuine, int forgeries) {
  Manifest m;
  for (int s = 0; s < signers; ++s) {
    for (int g = 0; g < genuine; ++g)
      m.push_back({s, g, ManifestEntry::Kind::genuine, s, "g.csv"});
    for (int f = 0; f < forgeries; ++f)
      m.push_back({(s + 1) % signers, f, ManifestEntry::Kind::forgery, s,
                   "f.csv"});
  }
  return m;
}

// Brute-force EER oracle: O(n^2) direct counting at every candidate
// threshold, same crossing rule, written independently of eval::roc_eer.
double brute_force_eer(const std::vector<double>& genuine,
                       const std::vector<double>& impostor) {
  std::vector<double> thresholds;
  thresholds.insert(thresholds.end(), genuine.begin(), genuine.end());
  thresholds.insert(thresholds.end(), impostor.begin(), impostor.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  double prev_far = 1.0, prev_frr = 0.0;
  for (const double th : thresholds) {
    std::size_t fa = 0, fr = 0;
    for (const double s : impostor)
      if (s >= th) ++fa;
    for (const double s : genuine)
      if (s < th) ++fr;
    const double far = static_cast<double>(fa) / impostor.size();
    const double frr = static_cast<double>(fr) / genuine.size();
    if (far <= frr) {
      if (far == frr) return far;
      const double gap1 = prev_far - prev_frr;
      const double gap2 = frr - far;
      const double s = gap1 / (gap1 + gap2);
      return prev_far + s * (far - prev_far);
    }
    prev_far = far;
    prev_frr = frr;
  }
  const double gap1 = prev_far - prev_frr;
  const double s = gap1 / (gap1 + 1.0);
  return prev_far * (1.0 - s);
}

}  // namespace

TEST_CASE("make_split: 25 genuine samples split 16/4/5") {
  const Manifest manifest = toy_manifest(3, 25, 12);
  const DatasetSplit split = make_split(manifest, 1);
  REQUIRE(split.signers.size() == 3);
  for (const auto& [signer, s] : split.signers) {
    CHECK(s.train.size() == 16);
    CHECK(s.validation.size() == 4);
    CHECK(s.test.size() == 5);
    CHECK(s.forgeries.size() == 12);

    std::set<int> all;
    all.insert(s.train.begin(), s.train.end());
    all.insert(s.validation.begin(), s.validation.end());
    all.insert(s.test.begin(), s.test.end());
    CHECK(all.size() == 25);  // disjoint, covering
  }
}

TEST_CASE("make_split: smaller datasets split proportionally") {
  const Manifest manifest = toy_manifest(2, 10, 0);
  const DatasetSplit split = make_split(manifest, 3);
  for (const auto& [signer, s] : split.signers) {
    CHECK(s.train.size() == 6);       // round(16*10/25) = 6
    CHECK(s.validation.size() == 2);  // round(4*10/25) = 2
    CHECK(s.test.size() == 2);
  }
}

TEST_CASE("make_split is deterministic in the seed") {
  const Manifest manifest = toy_manifest(4, 25, 0);
  const DatasetSplit a = make_split(manifest, 9);
  const DatasetSplit b = make_split(manifest, 9);
  const DatasetSplit c = make_split(manifest, 10);
  CHECK(a.signers.at(0).train == b.signers.at(0).train);
  bool any_difference = false;
  for (int s = 0; s < 4; ++s)
    any_difference =
        any_difference || a.signers.at(s).train != c.signers.at(s).train;
  CHECK(any_difference);
}

TEST_CASE("split file round trip") {
  const Manifest manifest = toy_manifest(2, 25, 12);
  const DatasetSplit split = make_split(manifest, 5);
  const std::string path = "split_test.csv";
  write_split(path, split);
  const DatasetSplit back = read_split(path);
  CHECK(back.signers.size() == split.signers.size());
  CHECK(back.signers.at(1).train == split.signers.at(1).train);
  CHECK(back.signers.at(1).forgeries == split.signers.at(1).forgeries);
  std::remove(path.c_str());
}

TEST_CASE("manifest round trip and parse errors") {
  const Manifest manifest = toy_manifest(2, 3, 2);
  const std::string path = "manifest_test.csv";
  write_manifest(path, manifest);
  const Manifest back = read_manifest(path);
  REQUIRE(back.size() == manifest.size());
  CHECK(back[0].signer_id == manifest[0].signer_id);
  CHECK(back[0].path == manifest[0].path);
  CHECK(back[4].kind == ManifestEntry::Kind::forgery);
  std::remove(path.c_str());

  std::FILE* f = std::fopen(path.c_str(), "wb");
  std::fputs("signer_id,sample_id,kind,target_id,path\n1,2,bogus,1,x\n", f);
  std::fclose(f);
  CHECK_THROWS_AS(read_manifest(path), ParseError);
  std::remove(path.c_str());
}

TEST_CASE("recognition_accuracy: toys") {
  CHECK(recognition_accuracy({1, 2, 3}, {1, 2, 3}) == 1.0);
  CHECK(recognition_accuracy({0, 0, 0}, {1, 2, 3}) == 0.0);
  CHECK(recognition_accuracy({1, 0}, {1, 1}) == 0.5);
  CHECK_THROWS_AS(recognition_accuracy({}, {}), std::invalid_argument);
}

TEST_CASE("verification_trials: counting for 8 signers") {
  // 8 signers x 5 test samples, 12 forgeries per signer
  std::vector<traj::Mat> storage;
  storage.reserve(8 * 5 + 8 * 12);
  EvalSet set;
  set.num_classes = 8;
  for (int s = 0; s < 8; ++s)
    for (int i = 0; i < 5; ++i) {
      storage.emplace_back(1, 1);
      set.test_genuine.emplace_back(s, &storage.back());
    }
  for (int s = 0; s < 8; ++s)
    for (int f = 0; f < 12; ++f) {
      storage.emplace_back(1, 1);
      set.forgeries.emplace_back(s, &storage.back());
    }

  const ScoreFn uniform_scores = [](const traj::Mat&) {
    return std::vector<double>(8, 0.125);
  };

  const TrialScores random_trials =
      verification_trials(uniform_scores, set, TrialMode::random_forgery);
  CHECK(random_trials.genuine.size() == 40);
  CHECK(random_trials.impostor.size() == 40 * 7);

  const TrialScores skilled_trials =
      verification_trials(uniform_scores, set, TrialMode::skilled_forgery);
  CHECK(skilled_trials.genuine.size() == 40);
  CHECK(skilled_trials.impostor.size() == 96);

  for (const double s : random_trials.genuine) {
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }

  EvalSet no_forgeries = set;
  no_forgeries.forgeries.clear();
  CHECK_THROWS_AS(verification_trials(uniform_scores, no_forgeries,
                                      TrialMode::skilled_forgery),
                  std::invalid_argument);
}

TEST_CASE("roc_eer: separable scores give EER 0") {
  const RocResult r = roc_eer({0.9, 0.8}, {0.1, 0.2});
  CHECK(r.eer == 0.0);
}

TEST_CASE("roc_eer: identical score distributions give EER 0.5") {
  const std::vector<double> scores = {0.1, 0.4, 0.6, 0.9};
  CHECK(roc_eer(scores, scores).eer == doctest::Approx(0.5).epsilon(1e-12));
  // odd-sized identical sets interpolate to 0.5 as well
  CHECK(roc_eer({0.2, 0.5, 0.8}, {0.2, 0.5, 0.8}).eer ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("roc_eer: worked example crosses at 1/3") {
  const RocResult r = roc_eer({0.9, 0.6, 0.4}, {0.5, 0.3, 0.1});
  CHECK(r.eer == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("roc_eer: empty input throws") {
  CHECK_THROWS_AS(roc_eer({}, {0.1}), std::invalid_argument);
  CHECK_THROWS_AS(roc_eer({0.1}, {}), std::invalid_argument);
}

TEST_CASE("roc_eer: FAR non-increasing, FRR non-decreasing") {
  Rng rng(12);
  std::vector<double> genuine, impostor;
  for (int i = 0; i < 60; ++i) genuine.push_back(rng.uniform(0.2, 1.0));
  for (int i = 0; i < 80; ++i) impostor.push_back(rng.uniform(0.0, 0.8));
  const RocResult r = roc_eer(genuine, impostor);
  for (std::size_t k = 1; k < r.points.size(); ++k) {
    CHECK(r.points[k].far <= r.points[k - 1].far);
    CHECK(r.points[k].frr >= r.points[k - 1].frr);
  }
  CHECK(r.eer >= 0.0);
  CHECK(r.eer <= 0.5);
}

TEST_CASE("roc_eer is invariant under strictly monotone score transforms") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> genuine, impostor;
    const int ng = 3 + static_cast<int>(rng.uniform_index(40));
    const int ni = 3 + static_cast<int>(rng.uniform_index(40));
    for (int i = 0; i < ng; ++i) genuine.push_back(rng.uniform(0.0, 1.0));
    for (int i = 0; i < ni; ++i) impostor.push_back(rng.uniform(0.0, 1.0));
    const double base = roc_eer(genuine, impostor).eer;

    auto warp = [](std::vector<double> v) {
      for (double& x : v) x = std::atan(3.0 * x - 1.0);  // strictly monotone
      return v;
    };
    CHECK(roc_eer(warp(genuine), warp(impostor)).eer == base);
  }
}

TEST_CASE("roc_eer: perfect extra scores never increase the EER") {
  Rng rng(33);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> genuine, impostor;
    const int ng = 2 + static_cast<int>(rng.uniform_index(30));
    const int ni = 2 + static_cast<int>(rng.uniform_index(30));
    for (int i = 0; i < ng; ++i) genuine.push_back(rng.uniform(0.0, 1.0));
    for (int i = 0; i < ni; ++i) impostor.push_back(rng.uniform(0.0, 1.0));
    const double base = roc_eer(genuine, impostor).eer;

    auto with_genuine = genuine;
    with_genuine.push_back(1.0);
    CHECK(roc_eer(with_genuine, impostor).eer <= base + 1e-12);

    auto with_impostor = impostor;
    with_impostor.push_back(0.0);
    CHECK(roc_eer(genuine, with_impostor).eer <= base + 1e-12);
  }
}

TEST_CASE("roc_eer matches the brute-force sweep on random instances") {
  Rng rng(64);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> genuine, impostor;
    const int ng = 1 + static_cast<int>(rng.uniform_index(100));
    const int ni = 1 + static_cast<int>(rng.uniform_index(100));
    for (int i = 0; i < ng; ++i)
      genuine.push_back(rng.uniform(0.0, 1.0) + 0.2);
    for (int i = 0; i < ni; ++i) impostor.push_back(rng.uniform(0.0, 1.0));
    CHECK(roc_eer(genuine, impostor).eer == brute_force_eer(genuine, impostor));
  }
}

TEST_CASE("report round trip preserves the EERs and ROC tables") {
  VerificationReport report;
  report.recognition_accuracy = 0.9375;
  report.genuine_trials = 40;
  report.random_impostor_trials = 280;
  report.skilled_impostor_trials = 96;
  report.roc_random = roc_eer({0.9, 0.8, 0.7}, {0.2, 0.1, 0.3});
  report.roc_skilled = roc_eer({0.9, 0.6, 0.4}, {0.5, 0.3, 0.1});

  const std::string path = "report_test.txt";
  write_report(path, report);
  const VerificationReport back = read_report(path);
  CHECK(back.recognition_accuracy == report.recognition_accuracy);
  CHECK(back.genuine_trials == 40);
  CHECK(back.roc_skilled.eer == doctest::Approx(report.roc_skilled.eer));
  REQUIRE(back.roc_random.points.size() == report.roc_random.points.size());
  CHECK(back.roc_random.points[2].far ==
        doctest::Approx(report.roc_random.points[2].far));
  std::remove(path.c_str());

  const std::string svg = "roc_test.svg";
  write_roc_svg(svg, report);
  std::FILE* f = std::fopen(svg.c_str(), "rb");
  REQUIRE(f);
  char head[6] = {};
  REQUIRE(std::fread(head, 1, 4, f) == 4);
  CHECK(std::string(head) == "<svg");
  std::fclose(f);
  std::remove(svg.c_str());
}
