#include "cli/descriptors.hpp"

#include <poros/error.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace poros::cli {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

std::uint64_t parse_uint(const std::string& text, const std::string& what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw SchemaError(what + ": expected an unsigned integer, got \"" + text + "\"");
  }
  return v;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_json(const std::string& text_or_path) {
  const bool inline_json = !text_or_path.empty() &&
                           (text_or_path.front() == '{' || text_or_path.front() == '[');
  const std::string text = inline_json ? text_or_path : read_file(text_or_path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("$: malformed JSON: ") + e.what());
  }
}

SetInput parse_set(const std::string& text, std::size_t default_depth) {
  const std::vector<std::string> parts = split(text, ':');
  const std::string& kind = parts.empty() ? text : parts[0];
  auto depth_at = [&](std::size_t i) {
    if (parts.size() > i + 1) throw SchemaError("set descriptor \"" + text + "\": too many fields");
    return parts.size() > i ? static_cast<std::size_t>(parse_uint(parts[i], "depth"))
                            : default_depth;
  };
  json d;
  if (kind == "geometric") {
    if (parts.size() < 2) throw SchemaError("set descriptor \"" + text + "\": missing ratio q");
    d = {{"kind", "geometric"}, {"q", parts[1]}, {"depth", depth_at(2)}};
  } else if (kind == "factorial" || kind == "squared-exponential" || kind == "example-2-8") {
    d = {{"kind", kind}, {"depth", depth_at(1)}};
    if (kind == "example-2-8") d["partition"] = {{"kind", "dyadic"}};
  } else if (kind == "random-ladder") {
    if (parts.size() < 2) throw SchemaError("set descriptor \"" + text + "\": missing seed");
    d = {{"kind", "random-ladder"}, {"seed", parse_uint(parts[1], "seed")}, {"depth", depth_at(2)}};
  } else if (!text.empty() && (text.front() == '{' || text.find(".json") != std::string::npos)) {
    d = load_json(text);
  } else {
    throw SchemaError("set descriptor \"" + text + "\": unknown kind");
  }
  SetInput in{gen_from_descriptor(d), d, std::nullopt};
  if (d.is_object() && d.value("kind", "") == "example-2-8") in.ladder = ladder_from_descriptor(d);
  return in;
}

PosSeq parse_tau(const std::string& text, const SetInput& input) {
  if (text == "self" || text == "enumeration") return enumerate_points(input.set);
  if (text == "tau" || text == "tau-star") {
    if (!input.ladder) throw SchemaError("--tau " + text + " needs a two-ladder set");
    PosSeq s;
    s.terms = text == "tau" ? input.ladder->tau() : input.ladder->tau_star();
    s.label = text;
    return s;
  }
  const std::vector<std::string> parts = split(text, ':');
  if (parts.size() == 3 && parts[0] == "stride") {
    const std::uint64_t step = parse_uint(parts[1], "stride step");
    const std::uint64_t offset = parse_uint(parts[2], "stride offset");
    if (step == 0 || offset >= step) throw SchemaError("stride needs 0 <= offset < step");
    const PosSeq all = enumerate_points(input.set);
    std::vector<std::size_t> pos;
    for (std::size_t i = offset; i < all.size(); i += step) pos.push_back(i);
    return subsequence(all, pos, text);
  }
  const json j = load_json(text);
  if (!j.is_array()) throw SchemaError("$: tau must be an array of log2 strings");
  PosSeq s;
  s.label = "user";
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) throw SchemaError("$[" + std::to_string(i) + "]: expected a string");
    try {
      s.terms.push_back(LogValue::from_log2(parse_rational(j[i].get<std::string>())));
    } catch (const std::exception&) {
      throw SchemaError("$[" + std::to_string(i) + "]: not a rational");
    }
  }
  return s;
}

std::shared_ptr<const MetricOracle> parse_space(const std::string& text,
                                                std::size_t default_depth, json* canonical) {
  json c;
  std::shared_ptr<const MetricOracle> out;
  if (text == "ray") {
    c = {{"kind", "ray"}};
    out = HalfLineSpace::ray();
  } else if (text == "circle") {
    c = {{"kind", "circle"}};
    out = std::make_shared<CircleSpace>();
  } else if (text == "single-point") {
    c = {{"kind", "single-point"}};
    out = std::make_shared<SinglePointSpace>();
  } else if (text.rfind("star:", 0) == 0 || text.rfind("distorted:", 0) == 0) {
    const std::size_t first = text.find(':');
    const std::size_t second = text.find(':', first + 1);
    if (second == std::string::npos) throw SchemaError("space \"" + text + "\": missing set");
    const std::string param = text.substr(first + 1, second - first - 1);
    SetInput in = parse_set(text.substr(second + 1), default_depth);
    if (text[0] == 's') {
      const auto rays = static_cast<std::uint32_t>(parse_uint(param, "rays"));
      if (rays == 0) throw SchemaError("star needs at least one ray");
      c = {{"kind", "star"}, {"rays", rays}, {"set", in.descriptor}};
      out = std::make_shared<StarSpace>(std::move(in.set), rays);
    } else {
      Rational factor;
      try {
        factor = parse_rational(param);
      } catch (const std::exception&) {
        throw SchemaError("distortion factor \"" + param + "\" is not a rational");
      }
      if (factor <= 0) throw SchemaError("distortion factor must be positive");
      c = {{"kind", "distorted"}, {"factor", param}, {"set", in.descriptor}};
      auto base = std::make_shared<const HalfLineSpace>(std::move(in.set));
      out = std::make_shared<DistortedSpace>(base, factor);
    }
  } else {
    SetInput in = parse_set(text, default_depth);
    c = {{"kind", "half-line"}, {"set", in.descriptor}};
    out = std::make_shared<HalfLineSpace>(std::move(in.set));
  }
  if (canonical) *canonical = std::move(c);
  return out;
}

}  // namespace poros::cli
