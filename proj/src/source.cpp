#include "cmap/source.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cmap/error.hpp"
#include "cmap/random.hpp"

namespace cmap {

std::string to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::uniform: return "uniform";
    case SourceKind::gaussian: return "gaussian";
    case SourceKind::gaussian_mixture: return "gaussian-mixture";
    case SourceKind::file: return "file";
  }
  return "unknown";
}

SourceKind parse_source_kind(const std::string& name) {
  if (name == "uniform") return SourceKind::uniform;
  if (name == "gaussian") return SourceKind::gaussian;
  if (name == "gaussian-mixture") return SourceKind::gaussian_mixture;
  if (name == "file") return SourceKind::file;
  throw InvalidArgument("unknown source kind '" + name + "'");
}

void SourceSpec::validate() const {
  if (!(v_min < v_max)) throw InvalidArgument("source: v_min must be < v_max");
  switch (kind) {
    case SourceKind::uniform:
      if (!(low < high)) throw InvalidArgument("source: uniform requires low < high");
      break;
    case SourceKind::gaussian:
      if (means.empty() || stds.empty()) throw InvalidArgument("source: gaussian requires means and stds");
      if (!(stds[0] > 0.0)) throw InvalidArgument("source: stds must be > 0");
      break;
    case SourceKind::gaussian_mixture: {
      if (means.empty()) throw InvalidArgument("source: mixture requires at least one component");
      if (stds.size() != means.size() || weights.size() != means.size()) {
        throw InvalidArgument("source: means, stds and weights must have equal length");
      }
      for (double s : stds) {
        if (!(s > 0.0)) throw InvalidArgument("source: stds must be > 0");
      }
      for (double w : weights) {
        if (!(w >= 0.0)) throw InvalidArgument("source: weights must be >= 0");
      }
      const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
      if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("source: weights must sum to 1");
      break;
    }
    case SourceKind::file:
      if (path.empty() && file_values.empty()) throw InvalidArgument("source: file source requires a path");
      break;
  }
}

SourceSpec mixture_preset() {
  SourceSpec s;
  s.kind = SourceKind::gaussian_mixture;
  s.means = {-0.35, 0.35};
  s.stds = {0.45, 0.45};
  s.weights = {0.5, 0.5};
  return s;
}

SourceSpec resolve_source(SourceSpec spec) {
  if (spec.kind != SourceKind::file || !spec.file_values.empty()) return spec;
  std::ifstream in(spec.path);
  if (!in) throw IoError("cannot open source file '" + spec.path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  for (char& c : text) {
    if (c == ',') c = ' ';
  }
  std::istringstream tokens(text);
  std::string tok;
  while (tokens >> tok) {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      spec.file_values.push_back(v);
    } catch (const std::exception&) {
      throw IoError("source file '" + spec.path + "': not a number: '" + tok + "'");
    }
  }
  if (spec.file_values.empty()) throw IoError("source file '" + spec.path + "' contains no values");
  return spec;
}

std::vector<double> gen_source(const SourceSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("gen_source: n must be >= 1");
  spec.validate();
  const SourceSpec resolved = resolve_source(spec);

  CounterStream rng(seed);
  // Mixture component choices use their own stream so the Gaussian draws
  // stay paired exactly as for a single Gaussian.
  CounterStream pick(derive_key(seed, 0x6d6978));
  std::vector<double> out(n);
  for (double& x : out) {
    double v = 0.0;
    switch (resolved.kind) {
      case SourceKind::uniform:
        v = resolved.low + (resolved.high - resolved.low) * rng.uniform();
        break;
      case SourceKind::gaussian:
        v = resolved.means[0] + resolved.stds[0] * rng.normal();
        break;
      case SourceKind::gaussian_mixture: {
        const double u = pick.uniform();
        std::size_t c = 0;
        double acc = resolved.weights[0];
        while (u >= acc && c + 1 < resolved.weights.size()) acc += resolved.weights[++c];
        v = resolved.means[c] + resolved.stds[c] * rng.normal();
        break;
      }
      case SourceKind::file: {
        const auto size = resolved.file_values.size();
        v = resolved.file_values[rng.next_u64() % size];
        break;
      }
    }
    x = clip(v, resolved.v_min, resolved.v_max);
  }
  return out;
}

}  // namespace cmap
