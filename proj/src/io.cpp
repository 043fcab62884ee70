#include "cmap/io.hpp"

#include <fstream>

#include "cmap/error.hpp"

namespace cmap {

namespace schema {

namespace {
void require_object(const Json& obj, const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where + ": expected an object");
}
}  // namespace

const Json& field(const Json& obj, const std::string& key, const std::string& where) {
  require_object(obj, where);
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where + "." + key + ": missing field");
  return *it;
}

double number(const Json& obj, const std::string& key, const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_number()) throw SchemaError(where + "." + key + ": expected a number");
  return v.get<double>();
}

double number_or(const Json& obj, const std::string& key, double fallback, const std::string& where) {
  require_object(obj, where);
  if (!obj.contains(key)) return fallback;
  return number(obj, key, where);
}

std::vector<double> numbers(const Json& obj, const std::string& key, const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_array()) throw SchemaError(where + "." + key + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      throw SchemaError(where + "." + key + "[" + std::to_string(i) + "]: expected a number");
    }
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::string string(const Json& obj, const std::string& key, const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_string()) throw SchemaError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

void expect_type(const Json& obj, const std::string& type, const std::string& where) {
  const std::string got = string(obj, "type", where);
  if (got != type) throw SchemaError(where + ".type: expected \"" + type + "\", got \"" + got + "\"");
}

}  // namespace schema

namespace {

Json points_json(std::span<const ComplexPoint> points) {
  Json arr = Json::array();
  for (const auto& p : points) arr.push_back({p.re, p.im});
  return arr;
}

std::vector<ComplexPoint> points_from_json(const Json& obj, const std::string& where) {
  const Json& arr = schema::field(obj, "points", where);
  if (!arr.is_array() || arr.empty()) throw SchemaError(where + ".points: expected a non-empty array");
  std::vector<ComplexPoint> points;
  points.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const Json& p = arr[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw SchemaError(where + ".points[" + std::to_string(i) + "]: expected [re, im]");
    }
    points.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return points;
}

template <typename F>
auto rethrow_as_schema(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const InvalidArgument& e) {
    throw SchemaError(where + ": " + e.what());
  } catch (const EmptyInput& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

}  // namespace

Json to_json(const LevelSet& levels) {
  return Json{{"type", "levels"},
              {"values", std::vector<double>(levels.values().begin(), levels.values().end())},
              {"v_min", levels.v_min()},
              {"v_max", levels.v_max()}};
}

Json to_json(const Constellation& constellation) {
  return Json{{"type", "constellation"}, {"points", points_json(constellation.points())}};
}

Json to_json(const MappingParams& params) {
  if (const auto* q = std::get_if<QamParams>(&params)) return Json{{"type", "qam"}, {"levels", to_json(q->levels)}};
  if (const auto* m = std::get_if<MrcParams>(&params)) {
    return Json{{"type", "mrc"},
                {"levels", to_json(m->levels)},
                {"d_re", m->re.boundaries},
                {"d_im", m->im.boundaries},
                {"delta", m->re.delta}};
  }
  if (const auto* m = std::get_if<MicParams>(&params)) {
    return Json{{"type", "mic"},
                {"points", points_json(m->constellation.points())},
                {"delta", m->delta},
                {"v_min", m->v_min},
                {"v_max", m->v_max}};
  }
  const auto& id = std::get<IdentityParams>(params);
  return Json{{"type", "identity"}, {"v_min", id.v_min}, {"v_max", id.v_max}};
}

Json to_json(const AffineDecoder& decoder) {
  return Json{{"type", "affine"}, {"gain", decoder.gain}, {"bias", decoder.bias}};
}

Json to_json(const SourceSpec& s) {
  Json j{{"kind", to_string(s.kind)}, {"v_min", s.v_min}, {"v_max", s.v_max}};
  switch (s.kind) {
    case SourceKind::uniform:
      j["low"] = s.low;
      j["high"] = s.high;
      break;
    case SourceKind::gaussian:
      j["mean"] = s.means.at(0);
      j["std"] = s.stds.at(0);
      break;
    case SourceKind::gaussian_mixture:
      j["means"] = s.means;
      j["stds"] = s.stds;
      j["weights"] = s.weights;
      break;
    case SourceKind::file:
      j["path"] = s.path;
      break;
  }
  return j;
}

LevelSet levels_from_json(const Json& j, const std::string& where) {
  schema::expect_type(j, "levels", where);
  auto values = schema::numbers(j, "values", where);
  const double v_min = schema::number(j, "v_min", where);
  const double v_max = schema::number(j, "v_max", where);
  return rethrow_as_schema(where + ".values", [&] { return LevelSet(std::move(values), v_min, v_max); });
}

Constellation constellation_from_json(const Json& j, const std::string& where) {
  schema::expect_type(j, "constellation", where);
  return Constellation(points_from_json(j, where));
}

MappingParams mapping_from_json(const Json& j, const std::string& where) {
  const std::string type = schema::string(j, "type", where);
  if (type == "qam") return QamParams{levels_from_json(schema::field(j, "levels", where), where + ".levels")};
  if (type == "mrc") {
    LevelSet levels = levels_from_json(schema::field(j, "levels", where), where + ".levels");
    const double delta = schema::number(j, "delta", where);
    if (!(delta > 0.0)) throw SchemaError(where + ".delta: must be > 0");
    BoundarySet re{schema::numbers(j, "d_re", where), delta};
    BoundarySet im{schema::numbers(j, "d_im", where), delta};
    const std::size_t expected = levels.size() - 1;
    if (re.boundaries.size() != expected) {
      throw SchemaError(where + ".d_re: expected " + std::to_string(expected) + " boundaries");
    }
    if (im.boundaries.size() != expected) {
      throw SchemaError(where + ".d_im: expected " + std::to_string(expected) + " boundaries");
    }
    return MrcParams{std::move(re), std::move(im), std::move(levels)};
  }
  if (type == "mic") {
    const double delta = schema::number(j, "delta", where);
    if (!(delta > 0.0)) throw SchemaError(where + ".delta: must be > 0");
    const double v_min = schema::number_or(j, "v_min", kDefaultVMin, where);
    const double v_max = schema::number_or(j, "v_max", kDefaultVMax, where);
    if (!(v_min < v_max)) throw SchemaError(where + ".v_min: must be < v_max");
    return MicParams{Constellation(points_from_json(j, where)), delta, v_min, v_max};
  }
  if (type == "identity") {
    const double v_min = schema::number_or(j, "v_min", kDefaultVMin, where);
    const double v_max = schema::number_or(j, "v_max", kDefaultVMax, where);
    if (!(v_min < v_max)) throw SchemaError(where + ".v_min: must be < v_max");
    return IdentityParams{v_min, v_max};
  }
  throw SchemaError(where + ".type: unknown mapping type \"" + type + "\"");
}

AffineDecoder decoder_from_json(const Json& j, const std::string& where) {
  schema::expect_type(j, "affine", where);
  return AffineDecoder{schema::number(j, "gain", where), schema::number(j, "bias", where)};
}

SourceSpec source_from_json(const Json& j, const std::string& where) {
  SourceSpec s;
  const std::string kind = schema::string(j, "kind", where);
  s.kind = rethrow_as_schema(where + ".kind", [&] { return parse_source_kind(kind); });
  s.v_min = schema::number_or(j, "v_min", kDefaultVMin, where);
  s.v_max = schema::number_or(j, "v_max", kDefaultVMax, where);
  switch (s.kind) {
    case SourceKind::uniform:
      s.low = schema::number_or(j, "low", s.v_min, where);
      s.high = schema::number_or(j, "high", s.v_max, where);
      break;
    case SourceKind::gaussian:
      s.means = {schema::number_or(j, "mean", 0.0, where)};
      s.stds = {schema::number_or(j, "std", 1.0, where)};
      s.weights = {1.0};
      break;
    case SourceKind::gaussian_mixture:
      s.means = schema::numbers(j, "means", where);
      s.stds = schema::numbers(j, "stds", where);
      s.weights = schema::numbers(j, "weights", where);
      break;
    case SourceKind::file:
      s.path = schema::string(j, "path", where);
      break;
  }
  rethrow_as_schema(where, [&] {
    s.validate();
    return 0;
  });
  return s;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(path + ": invalid JSON: " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

void save_params(const std::string& path, const MappingParams& params) { write_json_file(path, to_json(params)); }

MappingParams load_params(const std::string& path) { return mapping_from_json(read_json_file(path), path); }

}  // namespace cmap
