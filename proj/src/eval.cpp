#include "airsig/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "airsig/errors.hpp"
#include "airsig/rng.hpp"

namespace airsig::eval {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

void write_manifest(const std::string& path, const Manifest& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "signer_id,sample_id,kind,target_id,path\n";
  for (const auto& e : manifest)
    out << e.signer_id << ',' << e.sample_id << ','
        << (e.kind == ManifestEntry::Kind::genuine ? "genuine" : "forgery")
        << ',' << e.target_id << ',' << e.path << '\n';
  if (!out) throw IoError("write failed: " + path);
}

Manifest read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) ||
      line != "signer_id,sample_id,kind,target_id,path")
    throw ParseError("missing manifest header", 1);

  Manifest manifest;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = split_fields(line, ',');
    if (f.size() != 5) throw ParseError("expected 5 fields", row);
    ManifestEntry e;
    try {
      e.signer_id = std::stoi(f[0]);
      e.sample_id = std::stoi(f[1]);
      e.target_id = std::stoi(f[3]);
    } catch (const std::exception&) {
      throw ParseError("non-numeric id", row);
    }
    if (f[2] == "genuine")
      e.kind = ManifestEntry::Kind::genuine;
    else if (f[2] == "forgery")
      e.kind = ManifestEntry::Kind::forgery;
    else
      throw ParseError("unknown kind '" + f[2] + "'", row);
    e.path = f[4];
    manifest.push_back(std::move(e));
  }
  return manifest;
}

DatasetSplit make_split(const Manifest& manifest, std::uint64_t seed) {
  std::map<int, std::vector<int>> genuine;
  std::map<int, std::vector<int>> forgeries;
  for (const auto& e : manifest) {
    if (e.kind == ManifestEntry::Kind::genuine)
      genuine[e.signer_id].push_back(e.sample_id);
    else
      forgeries[e.target_id].push_back(e.sample_id);
  }
  if (genuine.empty())
    throw std::invalid_argument("make_split: no genuine samples in manifest");

  DatasetSplit split;
  for (auto& [signer, ids] : genuine) {
    std::sort(ids.begin(), ids.end());
    Rng rng = Rng::from(seed, static_cast<std::uint64_t>(signer),
                        0x53504c54ULL);  // "SPLT"
    rng.shuffle(ids);

    const std::size_t n = ids.size();
    if (n < 3)
      throw std::invalid_argument(
          "make_split: signer " + std::to_string(signer) +
          " has fewer than 3 genuine samples");
    // 16/4/5 of 25, proportional below that, always leaving a test share.
    std::size_t n_train, n_val;
    if (n >= 25) {
      n_train = 16;
      n_val = 4;
    } else {
      n_train = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::lround(16.0 * n / 25.0)));
      n_val = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::lround(4.0 * n / 25.0)));
      while (n_train + n_val + 1 > n) {
        if (n_train > 1)
          --n_train;
        else
          --n_val;
      }
    }
    SignerSplit& s = split.signers[signer];
    s.train.assign(ids.begin(), ids.begin() + n_train);
    s.validation.assign(ids.begin() + n_train, ids.begin() + n_train + n_val);
    s.test.assign(ids.begin() + n_train + n_val, ids.end());
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.validation.begin(), s.validation.end());
    std::sort(s.test.begin(), s.test.end());

    auto fit = forgeries.find(signer);
    if (fit != forgeries.end()) {
      s.forgeries = fit->second;
      std::sort(s.forgeries.begin(), s.forgeries.end());
    }
  }
  return split;
}

void write_split(const std::string& path, const DatasetSplit& split) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "signer_id,sample_id,kind,role\n";
  for (const auto& [signer, s] : split.signers) {
    for (const int id : s.train)
      out << signer << ',' << id << ",genuine,train\n";
    for (const int id : s.validation)
      out << signer << ',' << id << ",genuine,val\n";
    for (const int id : s.test) out << signer << ',' << id << ",genuine,test\n";
    for (const int id : s.forgeries)
      out << signer << ',' << id << ",forgery,forgery\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

DatasetSplit read_split(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "signer_id,sample_id,kind,role")
    throw ParseError("missing split header", 1);

  DatasetSplit split;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = split_fields(line, ',');
    if (f.size() != 4) throw ParseError("expected 4 fields", row);
    int signer = 0, id = 0;
    try {
      signer = std::stoi(f[0]);
      id = std::stoi(f[1]);
    } catch (const std::exception&) {
      throw ParseError("non-numeric id", row);
    }
    SignerSplit& s = split.signers[signer];
    if (f[3] == "train")
      s.train.push_back(id);
    else if (f[3] == "val")
      s.validation.push_back(id);
    else if (f[3] == "test")
      s.test.push_back(id);
    else if (f[3] == "forgery")
      s.forgeries.push_back(id);
    else
      throw ParseError("unknown role '" + f[3] + "'", row);
  }
  return split;
}

double recognition_accuracy(const std::vector<int>& predicted,
                            const std::vector<int>& labels) {
  if (predicted.empty() || predicted.size() != labels.size())
    throw std::invalid_argument("recognition_accuracy: empty or mismatched");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i] == labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

TrialScores verification_trials(const ScoreFn& score_fn, const EvalSet& set,
                                TrialMode mode) {
  if (set.test_genuine.empty())
    throw std::invalid_argument("verification_trials: no test samples");
  if (set.num_classes < 2)
    throw std::invalid_argument("verification_trials: need >= 2 classes");
  if (mode == TrialMode::skilled_forgery && set.forgeries.empty())
    throw std::invalid_argument("verification_trials: no forgery samples");

  TrialScores scores;
  for (const auto& [label, mat] : set.test_genuine) {
    const std::vector<double> probs = score_fn(*mat);
    if (probs.size() != set.num_classes)
      throw std::invalid_argument("verification_trials: bad score vector");
    scores.genuine.push_back(probs[label]);
    if (mode == TrialMode::random_forgery) {
      for (std::size_t c = 0; c < set.num_classes; ++c)
        if (static_cast<int>(c) != label)
          scores.impostor.push_back(probs[c]);
    }
  }
  if (mode == TrialMode::skilled_forgery) {
    for (const auto& [target, mat] : set.forgeries) {
      const std::vector<double> probs = score_fn(*mat);
      scores.impostor.push_back(probs[target]);
    }
  }
  return scores;
}

RocResult roc_eer(std::vector<double> genuine_scores,
                  std::vector<double> impostor_scores) {
  if (genuine_scores.empty() || impostor_scores.empty())
    throw std::invalid_argument("roc_eer: empty score set");
  std::sort(genuine_scores.begin(), genuine_scores.end());
  std::sort(impostor_scores.begin(), impostor_scores.end());

  std::vector<double> thresholds;
  thresholds.reserve(genuine_scores.size() + impostor_scores.size());
  thresholds.insert(thresholds.end(), genuine_scores.begin(),
                    genuine_scores.end());
  thresholds.insert(thresholds.end(), impostor_scores.begin(),
                    impostor_scores.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  const double ng = static_cast<double>(genuine_scores.size());
  const double ni = static_cast<double>(impostor_scores.size());
  RocResult result;
  result.points.reserve(thresholds.size());
  for (const double th : thresholds) {
    const auto gi = std::lower_bound(genuine_scores.begin(),
                                     genuine_scores.end(), th);
    const auto ii = std::lower_bound(impostor_scores.begin(),
                                     impostor_scores.end(), th);
    RocPoint p;
    p.threshold = th;
    p.frr = static_cast<double>(gi - genuine_scores.begin()) / ng;
    p.far = static_cast<double>(impostor_scores.end() - ii) / ni;
    result.points.push_back(p);
  }

  // FAR - FRR is non-increasing across the sweep; find the sign change and
  // interpolate the two step curves linearly between adjacent thresholds.
  double a1 = 1.0, r1 = 0.0;
  bool found = false;
  for (std::size_t k = 0; k < result.points.size(); ++k) {
    const double a2 = result.points[k].far;
    const double r2 = result.points[k].frr;
    if (a2 <= r2) {
      if (a2 == r2) {
        result.eer = a2;
      } else {
        const double gap1 = a1 - r1;
        const double gap2 = r2 - a2;
        const double s = gap1 / (gap1 + gap2);
        result.eer = a1 + s * (a2 - a1);
      }
      found = true;
      break;
    }
    a1 = a2;
    r1 = r2;
  }
  if (!found) {
    // Crossing sits past the last real threshold, where FAR drops to 0 and
    // FRR reaches 1.
    const double gap1 = a1 - r1;
    const double s = gap1 / (gap1 + 1.0);
    result.eer = a1 * (1.0 - s);
  }
  return result;
}

namespace {

void write_roc_block(std::ostream& out, const char* name,
                     const RocResult& roc) {
  out << '[' << name << "]\n";
  out << "threshold far frr\n";
  for (const auto& p : roc.points)
    out << format_double(p.threshold) << ' ' << format_double(p.far) << ' '
        << format_double(p.frr) << '\n';
}

}  // namespace

void write_report(const std::string& path, const VerificationReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "# air-signature verification report\n";
  out << "recognition_accuracy " << format_double(report.recognition_accuracy)
      << '\n';
  out << "genuine_trials " << report.genuine_trials << '\n';
  out << "random_impostor_trials " << report.random_impostor_trials << '\n';
  out << "skilled_impostor_trials " << report.skilled_impostor_trials << '\n';
  out << "eer_random " << format_double(report.roc_random.eer) << '\n';
  out << "eer_skilled " << format_double(report.roc_skilled.eer) << '\n';
  write_roc_block(out, "roc_random", report.roc_random);
  write_roc_block(out, "roc_skilled", report.roc_skilled);
  if (!out) throw IoError("write failed: " + path);
}

VerificationReport read_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);

  VerificationReport report;
  RocResult* block = nullptr;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    if (line == "[roc_random]") {
      block = &report.roc_random;
      continue;
    }
    if (line == "[roc_skilled]") {
      block = &report.roc_skilled;
      continue;
    }
    if (line == "threshold far frr") continue;

    std::istringstream ss(line);
    if (block) {
      RocPoint p;
      if (!(ss >> p.threshold >> p.far >> p.frr))
        throw ParseError("malformed ROC point", row);
      block->points.push_back(p);
      continue;
    }
    std::string key;
    ss >> key;
    if (key == "recognition_accuracy")
      ss >> report.recognition_accuracy;
    else if (key == "genuine_trials")
      ss >> report.genuine_trials;
    else if (key == "random_impostor_trials")
      ss >> report.random_impostor_trials;
    else if (key == "skilled_impostor_trials")
      ss >> report.skilled_impostor_trials;
    else if (key == "eer_random")
      ss >> report.roc_random.eer;
    else if (key == "eer_skilled")
      ss >> report.roc_skilled.eer;
    else
      throw ParseError("unknown report key '" + key + "'", row);
    if (!ss) throw ParseError("malformed value for '" + key + "'", row);
  }
  return report;
}

void write_roc_svg(const std::string& path, const VerificationReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);

  const int width = 560, height = 520;
  const double x0 = 70, y0 = 40, plot = 400;
  auto px = [&](double far) { return x0 + far * plot; };
  auto py = [&](double tar) { return y0 + (1.0 - tar) * plot; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // frame and grid
  for (int i = 0; i <= 5; ++i) {
    const double v = i / 5.0;
    out << "<line x1=\"" << px(v) << "\" y1=\"" << py(0) << "\" x2=\""
        << px(v) << "\" y2=\"" << py(1)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << px(0) << "\" y1=\"" << py(v) << "\" x2=\""
        << px(1) << "\" y2=\"" << py(v)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    char label[16];
    std::snprintf(label, sizeof(label), "%.1f", v);
    out << "<text x=\"" << px(v) - 8 << "\" y=\"" << py(0) + 18
        << "\" font-size=\"11\">" << label << "</text>\n";
    out << "<text x=\"" << x0 - 32 << "\" y=\"" << py(v) + 4
        << "\" font-size=\"11\">" << label << "</text>\n";
  }
  out << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << plot
      << "\" height=\"" << plot
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << x0 + plot / 2 - 70 << "\" y=\"" << y0 + plot + 36
      << "\" font-size=\"13\">False Accept Rate</text>\n";
  out << "<text x=\"16\" y=\"" << y0 + plot / 2
      << "\" font-size=\"13\" transform=\"rotate(-90 16 " << y0 + plot / 2
      << ")\">True Accept Rate</text>\n";

  const struct {
    const RocResult* roc;
    const char* color;
    const char* label;
  } curves[2] = {{&report.roc_random, "#1f77b4", "random forgeries"},
                 {&report.roc_skilled, "#d62728", "skilled forgeries"}};
  for (int c = 0; c < 2; ++c) {
    if (curves[c].roc->points.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"" << curves[c].color
        << "\" stroke-width=\"2\" points=\"";
    out << px(1.0) << ',' << py(1.0) << ' ';
    for (const auto& p : curves[c].roc->points)
      out << px(p.far) << ',' << py(1.0 - p.frr) << ' ';
    out << px(0.0) << ',' << py(0.0);
    out << "\"/>\n";
    char eer[64];
    std::snprintf(eer, sizeof(eer), "%s (EER %.2f%%)", curves[c].label,
                  100.0 * curves[c].roc->eer);
    out << "<rect x=\"" << x0 + 14 << "\" y=\"" << y0 + 14 + 20 * c
        << "\" width=\"12\" height=\"4\" fill=\"" << curves[c].color
        << "\"/>\n";
    out << "<text x=\"" << x0 + 32 << "\" y=\"" << y0 + 20 + 20 * c
        << "\" font-size=\"12\">" << eer << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace airsig::eval
