#include "cmap/mapping.hpp"

#include <algorithm>

#include "cmap/error.hpp"

namespace cmap {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<std::string> prefixed(const std::vector<std::string>& names) {
  std::vector<std::string> out{"p.re", "p.im"};
  out.insert(out.end(), names.begin(), names.end());
  return out;
}

}  // namespace

MappingKind kind_of(const MappingParams& params) noexcept {
  return std::visit(Overloaded{[](const QamParams&) { return MappingKind::qam; },
                               [](const MrcParams&) { return MappingKind::mrc; },
                               [](const MicParams&) { return MappingKind::mic; },
                               [](const IdentityParams&) { return MappingKind::identity; }},
                    params);
}

std::string to_string(MappingKind kind) {
  switch (kind) {
    case MappingKind::qam: return "qam";
    case MappingKind::mrc: return "mrc";
    case MappingKind::mic: return "mic";
    case MappingKind::identity: return "identity";
  }
  return "unknown";
}

MappingKind parse_mapping_kind(const std::string& name) {
  if (name == "qam") return MappingKind::qam;
  if (name == "mrc") return MappingKind::mrc;
  if (name == "mic") return MappingKind::mic;
  if (name == "identity") return MappingKind::identity;
  throw InvalidArgument("unknown mapping kind '" + name + "' (expected qam, mrc, mic or identity)");
}

MappingParams make_mapping(MappingKind kind, int m, double delta, double v_min, double v_max) {
  if (kind == MappingKind::identity) return IdentityParams{v_min, v_max};
  const LevelSet levels = make_uniform_levels(m, v_min, v_max);
  switch (kind) {
    case MappingKind::qam: return QamParams{levels};
    case MappingKind::mrc: return make_mrc_params(levels, delta);
    case MappingKind::mic: return make_mic_params(levels, levels, delta);
    default: break;
  }
  throw InvalidArgument("make_mapping: unsupported kind");
}

DualResult<ComplexPoint> map_point(const ComplexPoint& p, const MappingParams& params) {
  return std::visit(
      Overloaded{[&](const QamParams& q) {
                   // Hard quantizer: zero derivative almost everywhere.
                   const ComplexPoint v = qam_map(p, q.levels, q.levels);
                   return straight_through(v, v, GradTable(2, prefixed({})));
                 },
                 [&](const MrcParams& m) { return mrc_map_point(p, m); },
                 [&](const MicParams& m) { return mic_map_point(p, m); },
                 [&](const IdentityParams& id) {
                   const ComplexPoint v = clip(p, id.v_min, id.v_max);
                   GradTable g(2, prefixed({}));
                   g.at(0, 0) = 1.0;
                   g.at(1, 1) = 1.0;
                   return straight_through(v, v, std::move(g));
                 }},
      params);
}

ComplexPoint map_value(const ComplexPoint& p, const MappingParams& params) {
  return std::visit(Overloaded{[&](const QamParams& q) { return qam_map(p, q.levels, q.levels); },
                               [&](const MrcParams& m) {
                                 const ComplexPoint c = clip(p, m.levels.v_min(), m.levels.v_max());
                                 return ComplexPoint{mrc_forward(c.re, m.re, m.levels).level,
                                                     mrc_forward(c.im, m.im, m.levels).level};
                               },
                               [&](const MicParams& m) { return mic_forward(clip(p, m.v_min, m.v_max), m).point; },
                               [&](const IdentityParams& id) { return clip(p, id.v_min, id.v_max); }},
                    params);
}

template <typename Real>
std::pair<Real, Real> soft_map_value(Real p_re, Real p_im, const MappingParams& params,
                                     std::span<const Real> learnable) {
  if (learnable.size() != learnable_count(params)) {
    throw ShapeMismatch("soft_map_value: learnable vector has wrong length");
  }
  auto clamp = [](Real x, double lo, double hi) { return std::min(std::max(x, Real(lo)), Real(hi)); };
  return std::visit(
      Overloaded{[&](const QamParams& q) {
                   const ComplexPoint v =
                       qam_map({static_cast<double>(p_re), static_cast<double>(p_im)}, q.levels, q.levels);
                   return std::pair<Real, Real>{Real(v.re), Real(v.im)};
                 },
                 [&](const MrcParams& m) {
                   const std::size_t k_re = m.re.boundaries.size();
                   const auto levels = soft::widen<Real>(m.levels.values());
                   const Real x = clamp(p_re, m.levels.v_min(), m.levels.v_max());
                   const Real y = clamp(p_im, m.levels.v_min(), m.levels.v_max());
                   return std::pair<Real, Real>{
                       mrc_soft_value<Real>(x, learnable.subspan(0, k_re), levels, Real(m.re.delta)),
                       mrc_soft_value<Real>(y, learnable.subspan(k_re), levels, Real(m.im.delta))};
                 },
                 [&](const MicParams& m) {
                   const std::size_t n = m.constellation.size();
                   std::vector<Real> c_re(n);
                   std::vector<Real> c_im(n);
                   for (std::size_t j = 0; j < n; ++j) {
                     c_re[j] = learnable[2 * j];
                     c_im[j] = learnable[2 * j + 1];
                   }
                   return mic_soft_value<Real>(clamp(p_re, m.v_min, m.v_max), clamp(p_im, m.v_min, m.v_max), c_re,
                                               c_im, Real(m.delta));
                 },
                 [&](const IdentityParams& id) {
                   return std::pair<Real, Real>{clamp(p_re, id.v_min, id.v_max), clamp(p_im, id.v_min, id.v_max)};
                 }},
      params);
}

template std::pair<double, double> soft_map_value(double, double, const MappingParams&, std::span<const double>);
template std::pair<long double, long double> soft_map_value(long double, long double, const MappingParams&,
                                                            std::span<const long double>);

std::size_t cluster_index(const ComplexPoint& p, const MappingParams& params) {
  return std::visit(
      Overloaded{[&](const QamParams& q) { return qam_index(p, q.levels, q.levels); },
                 [&](const MrcParams& m) {
                   const ComplexPoint c = clip(p, m.levels.v_min(), m.levels.v_max());
                   return mrc_forward(c.im, m.im, m.levels).level_index * m.levels.size() +
                          mrc_forward(c.re, m.re, m.levels).level_index;
                 },
                 [&](const MicParams& m) { return mic_forward(clip(p, m.v_min, m.v_max), m).index; },
                 [](const IdentityParams&) -> std::size_t {
                   throw InvalidArgument("identity mapping has no finite constellation");
                 }},
      params);
}

std::vector<ComplexPoint> finite_points(const MappingParams& params) {
  return std::visit(
      Overloaded{[](const QamParams& q) {
                   const auto grid = make_qam_grid(q.levels, q.levels);
                   return std::vector<ComplexPoint>(grid.points().begin(), grid.points().end());
                 },
                 [](const MrcParams& m) {
                   const auto grid = make_qam_grid(m.levels, m.levels);
                   return std::vector<ComplexPoint>(grid.points().begin(), grid.points().end());
                 },
                 [](const MicParams& m) {
                   const auto pts = m.constellation.points();
                   return std::vector<ComplexPoint>(pts.begin(), pts.end());
                 },
                 [](const IdentityParams&) -> std::vector<ComplexPoint> {
                   throw InvalidArgument("identity mapping has no finite constellation");
                 }},
      params);
}

std::size_t learnable_count(const MappingParams& params) noexcept {
  return std::visit(Overloaded{[](const MrcParams& m) { return m.re.boundaries.size() + m.im.boundaries.size(); },
                               [](const MicParams& m) { return 2 * m.constellation.size(); },
                               [](const auto&) -> std::size_t { return 0; }},
                    params);
}

std::vector<std::string> learnable_names(const MappingParams& params) {
  std::vector<std::string> names;
  std::visit(Overloaded{[&](const MrcParams& m) {
                          for (std::size_t j = 0; j < m.re.boundaries.size(); ++j)
                            names.push_back("d_re[" + std::to_string(j) + "]");
                          for (std::size_t j = 0; j < m.im.boundaries.size(); ++j)
                            names.push_back("d_im[" + std::to_string(j) + "]");
                        },
                        [&](const MicParams& m) {
                          for (std::size_t j = 0; j < m.constellation.size(); ++j) {
                            names.push_back("c[" + std::to_string(j) + "].re");
                            names.push_back("c[" + std::to_string(j) + "].im");
                          }
                        },
                        [](const auto&) {}},
             params);
  return names;
}

std::vector<double> get_learnable(const MappingParams& params) {
  std::vector<double> values;
  std::visit(Overloaded{[&](const MrcParams& m) {
                          values = m.re.boundaries;
                          values.insert(values.end(), m.im.boundaries.begin(), m.im.boundaries.end());
                        },
                        [&](const MicParams& m) { values = complex_to_pair(m.constellation.points()); },
                        [](const auto&) {}},
             params);
  return values;
}

void set_learnable(MappingParams& params, std::span<const double> values) {
  if (values.size() != learnable_count(params)) {
    throw ShapeMismatch("set_learnable: expected " + std::to_string(learnable_count(params)) + " values, got " +
                        std::to_string(values.size()));
  }
  std::visit(Overloaded{[&](MrcParams& m) {
                          const std::size_t k = m.re.boundaries.size();
                          std::copy(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k),
                                    m.re.boundaries.begin());
                          std::copy(values.begin() + static_cast<std::ptrdiff_t>(k), values.end(),
                                    m.im.boundaries.begin());
                        },
                        [&](MicParams& m) {
                          for (std::size_t j = 0; j < m.constellation.size(); ++j) {
                            m.constellation[j] = {values[2 * j], values[2 * j + 1]};
                          }
                        },
                        [](auto&) {}},
             params);
}

std::vector<std::string> validate_mapping(const MappingParams& params) {
  if (const auto* m = std::get_if<MrcParams>(&params)) {
    auto warnings = validate_boundaries(m->re, m->levels);
    for (auto& w : validate_boundaries(m->im, m->levels)) warnings.push_back("imaginary axis: " + w);
    return warnings;
  }
  return {};
}

}  // namespace cmap
