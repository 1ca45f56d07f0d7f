#include "qgsaddle/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

namespace qgsaddle {

ConfigError::ConfigError(int line, const std::string& message)
    : std::invalid_argument(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

std::string_view to_string(InitialPreset preset) {
  switch (preset) {
    case InitialPreset::cmt: return "cmt";
    case InitialPreset::cos_x2: return "cos_x2";
    case InitialPreset::clm_cos: return "clm_cos";
    case InitialPreset::custom: return "custom";
    case InitialPreset::random: return "random";
  }
  return "unknown";
}

namespace {

// ---- expression evaluator -------------------------------------------------

struct Node {
  enum class Op { number, var1, var2, add, sub, mul, div, pow, neg, call };
  Op op = Op::number;
  double number = 0.0;
  double (*fn)(double) = nullptr;
  std::unique_ptr<Node> lhs, rhs;

  double eval(double x1, double x2) const {
    switch (op) {
      case Op::number: return number;
      case Op::var1: return x1;
      case Op::var2: return x2;
      case Op::add: return lhs->eval(x1, x2) + rhs->eval(x1, x2);
      case Op::sub: return lhs->eval(x1, x2) - rhs->eval(x1, x2);
      case Op::mul: return lhs->eval(x1, x2) * rhs->eval(x1, x2);
      case Op::div: return lhs->eval(x1, x2) / rhs->eval(x1, x2);
      case Op::pow: return std::pow(lhs->eval(x1, x2), rhs->eval(x1, x2));
      case Op::neg: return -lhs->eval(x1, x2);
      case Op::call: return fn(lhs->eval(x1, x2));
    }
    return 0.0;
  }
};

class Parser {
public:
  explicit Parser(std::string_view text) : s_(text) {}

  std::unique_ptr<Node> parse() {
    auto n = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression: " + what + " at offset " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  static std::unique_ptr<Node> binary(Node::Op op, std::unique_ptr<Node> a, std::unique_ptr<Node> b) {
    auto n = std::make_unique<Node>();
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }

  std::unique_ptr<Node> sum() {
    auto n = product();
    for (;;) {
      if (eat('+')) n = binary(Node::Op::add, std::move(n), product());
      else if (eat('-')) n = binary(Node::Op::sub, std::move(n), product());
      else return n;
    }
  }
  std::unique_ptr<Node> product() {
    auto n = unary();
    for (;;) {
      if (eat('*')) n = binary(Node::Op::mul, std::move(n), unary());
      else if (eat('/')) n = binary(Node::Op::div, std::move(n), unary());
      else return n;
    }
  }
  std::unique_ptr<Node> unary() {
    if (eat('-')) {
      auto n = std::make_unique<Node>();
      n->op = Node::Op::neg;
      n->lhs = unary();
      return n;
    }
    if (eat('+')) return unary();
    return power();
  }
  // Right associative; binds tighter than unary minus on its left (−x^2 = −(x^2)).
  std::unique_ptr<Node> power() {
    auto base = atom();
    if (eat('^')) return binary(Node::Op::pow, std::move(base), unary());
    return base;
  }
  std::unique_ptr<Node> atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (eat('(')) {
      auto n = sum();
      if (!eat(')')) fail("missing ')'");
      return n;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      const auto [end, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
      if (ec != std::errc()) fail("bad number");
      pos_ = static_cast<std::size_t>(end - s_.data());
      auto n = std::make_unique<Node>();
      n->number = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name(s_.substr(start, pos_ - start));
      auto n = std::make_unique<Node>();
      if (name == "x1" || name == "x") n->op = Node::Op::var1;
      else if (name == "x2") n->op = Node::Op::var2;
      else if (name == "pi") n->number = std::numbers::pi;
      else if (name == "e") n->number = std::numbers::e;
      else {
        static const std::map<std::string, double (*)(double)> functions{
            {"sin", [](double v) { return std::sin(v); }},   {"cos", [](double v) { return std::cos(v); }},
            {"tan", [](double v) { return std::tan(v); }},   {"exp", [](double v) { return std::exp(v); }},
            {"log", [](double v) { return std::log(v); }},   {"sqrt", [](double v) { return std::sqrt(v); }},
            {"tanh", [](double v) { return std::tanh(v); }}, {"abs", [](double v) { return std::abs(v); }},
        };
        const auto it = functions.find(name);
        if (it == functions.end()) fail("unknown name '" + name + "'");
        if (!eat('(')) fail("expected '(' after " + name);
        n->op = Node::Op::call;
        n->fn = it->second;
        n->lhs = sum();
        if (!eat(')')) fail("missing ')'");
      }
      return n;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
};

// ---- config parsing -------------------------------------------------------

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(int line, const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError(line, "cannot parse '" + v + "' as a number for key '" + key + "'");
  return out;
}

long long to_int(int line, const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size())
    throw ConfigError(line, "cannot parse '" + v + "' as an integer for key '" + key + "'");
  return out;
}

void require(bool ok, int line, const std::string& message) {
  if (!ok) throw ConfigError(line, message);
}

}  // namespace

std::function<double(double, double)> compile_expression(std::string_view text) {
  std::shared_ptr<Node> root = Parser(text).parse();
  return [root](double x1, double x2) { return root->eval(x1, x2); };
}

SimConfig parse_config(std::string_view text) {
  SimConfig c;
  std::string filter_mode = "auto";
  bool initial_set = false;
  std::map<std::string, int> seen;

  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string body = trim(raw);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    require(eq != std::string::npos, line, "expected key=value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    require(!seen.contains(key), line, "duplicate key '" + key + "' (first on line " +
                                           std::to_string(seen.count(key) ? seen[key] : 0) + ")");
    seen[key] = line;

    if (key == "model") {
      try {
        c.model = parse_model(value);
      } catch (const std::invalid_argument&) {
        throw ConfigError(line, "unknown model '" + value + "'");
      }
    } else if (key == "n") {
      const auto n = to_int(line, key, value);
      require(n >= 8 && n <= 8192 && n % 2 == 0, line, "n must be even and within [8, 8192], got " + value);
      c.n = static_cast<int>(n);
    } else if (key == "initial") {
      initial_set = true;
      if (value == "cmt") c.initial = InitialPreset::cmt;
      else if (value == "cos_x2") c.initial = InitialPreset::cos_x2;
      else if (value == "clm_cos") c.initial = InitialPreset::clm_cos;
      else if (value == "custom") c.initial = InitialPreset::custom;
      else if (value == "random") c.initial = InitialPreset::random;
      else throw ConfigError(line, "unknown initial preset '" + value + "'");
    } else if (key == "expression") {
      try {
        compile_expression(value);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(line, e.what());
      }
      c.expression = value;
    } else if (key == "step") {
      if (value == "cfl") c.step.mode = StepPolicy::Mode::cfl;
      else if (value == "fixed") c.step.mode = StepPolicy::Mode::fixed;
      else throw ConfigError(line, "step must be cfl or fixed");
    } else if (key == "dt") {
      c.step.dt = to_double(line, key, value);
      require(c.step.dt > 0.0, line, "dt must be > 0");
    } else if (key == "cfl") {
      c.step.cfl = to_double(line, key, value);
      require(c.step.cfl > 0.0 && c.step.cfl <= 1.0, line, "cfl must lie in (0, 1]");
    } else if (key == "dt_max") {
      c.step.dt_max = to_double(line, key, value);
      require(c.step.dt_max > 0.0, line, "dt_max must be > 0");
    } else if (key == "t_end") {
      c.step.t_end = to_double(line, key, value);
      require(c.step.t_end >= 0.0, line, "t_end must be >= 0");
    } else if (key == "snapshot_interval") {
      c.step.snapshot_interval = to_double(line, key, value);
      require(c.step.snapshot_interval > 0.0, line, "snapshot_interval must be > 0");
    } else if (key == "filter") {
      require(value == "on" || value == "off" || value == "auto", line, "filter must be on, off or auto");
      filter_mode = value;
    } else if (key == "filter_strength") {
      c.filter.strength = to_double(line, key, value);
      require(c.filter.strength > 0.0, line, "filter_strength must be > 0");
    } else if (key == "filter_order") {
      c.filter.order = to_double(line, key, value);
      require(c.filter.order > 0.0, line, "filter_order must be > 0");
    } else if (key == "saddle_region") {
      if (value == "none") {
        c.saddle_region.reset();
      } else {
        std::vector<double> v;
        std::stringstream parts(value);
        std::string item;
        while (std::getline(parts, item, ',')) v.push_back(to_double(line, key, trim(item)));
        require(v.size() == 4, line, "saddle_region needs x1min,x1max,x2min,x2max");
        require(v[1] > v[0] && v[3] > v[2], line, "saddle_region bounds must increase");
        c.saddle_region = Region{v[0], v[1], v[2], v[3]};
      }
    } else if (key == "track_radius") {
      c.track_radius = to_double(line, key, value);
      require(c.track_radius >= 0.0, line, "track_radius must be >= 0");
    } else if (key == "checkpoint_interval") {
      c.checkpoint_interval = to_double(line, key, value);
      require(c.checkpoint_interval >= 0.0, line, "checkpoint_interval must be >= 0");
    } else if (key == "output_dir") {
      require(!value.empty(), line, "output_dir must not be empty");
      c.output_dir = value;
    } else if (key == "seed") {
      const auto s = to_int(line, key, value);
      require(s >= 0, line, "seed must be >= 0");
      c.seed = static_cast<std::uint64_t>(s);
    } else {
      throw ConfigError(line, "unknown key '" + key + "'");
    }
  }

  if (!initial_set && c.model == ModelTag::clm1d) c.initial = InitialPreset::clm_cos;
  const bool is_1d = c.model == ModelTag::clm1d;
  if (is_1d && (c.initial == InitialPreset::cmt || c.initial == InitialPreset::cos_x2))
    throw ConfigError(seen.count("initial") ? seen["initial"] : 0, "preset '" + std::string(to_string(c.initial)) +
                                                                       "' needs a 2D model");
  if (!is_1d && c.initial == InitialPreset::clm_cos)
    throw ConfigError(seen.count("initial") ? seen["initial"] : 0, "preset 'clm_cos' needs model clm1d");
  if (c.initial == InitialPreset::custom && c.expression.empty())
    throw ConfigError(0, "initial = custom needs an expression");
  if (is_1d && c.saddle_region) throw ConfigError(seen["saddle_region"], "saddle tracking needs a 2D model");
  c.filter.enabled = filter_mode == "on" || (filter_mode == "auto" && c.initial == InitialPreset::cmt);
  return c;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

State initial_state(const SimConfig& config) {
  const int n = config.n;
  if (config.model == ModelTag::clm1d) {
    Field1D f(n);
    switch (config.initial) {
      case InitialPreset::clm_cos: f = Field1D::from_function(n, [](double x) { return std::cos(x); }); break;
      case InitialPreset::custom: {
        const auto fn = compile_expression(config.expression);
        f = Field1D::from_function(n, [&](double x) { return fn(x, 0.0); });
        break;
      }
      case InitialPreset::random: {
        std::mt19937_64 rng(config.seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::vector<std::pair<double, double>> amp;
        for (int k = 1; k <= 4; ++k) amp.emplace_back(u(rng) / k, u(rng) / k);
        f = Field1D::from_function(n, [&](double x) {
          double v = 0.0;
          for (int k = 1; k <= 4; ++k) v += amp[k - 1].first * std::cos(k * x) + amp[k - 1].second * std::sin(k * x);
          return v;
        });
        break;
      }
      default: throw ConfigError(0, "preset does not apply to clm1d");
    }
    return dealias(f);
  }

  const Grid2D grid(n);
  Field2D f(grid);
  switch (config.initial) {
    case InitialPreset::cmt:
      f = Field2D::from_function(grid, [](double x1, double x2) { return std::sin(x1) * std::sin(x2) + std::cos(x2); });
      break;
    case InitialPreset::cos_x2: f = Field2D::from_function(grid, [](double, double x2) { return std::cos(x2); }); break;
    case InitialPreset::custom: f = Field2D::from_function(grid, compile_expression(config.expression)); break;
    case InitialPreset::random: {
      std::mt19937_64 rng(config.seed);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      struct Mode {
        int k1, k2;
        double a, b;
      };
      std::vector<Mode> modes;
      for (int k1 = -4; k1 <= 4; ++k1)
        for (int k2 = 0; k2 <= 4; ++k2) {
          if (k2 == 0 && k1 <= 0) continue;
          const double scale = 1.0 / std::hypot(k1, k2);
          modes.push_back({k1, k2, u(rng) * scale, u(rng) * scale});
        }
      f = Field2D::from_function(grid, [&](double x1, double x2) {
        double v = 0.0;
        for (const auto& m : modes) {
          const double ph = m.k1 * x1 + m.k2 * x2;
          v += m.a * std::cos(ph) + m.b * std::sin(ph);
        }
        return v;
      });
      break;
    }
    default: throw ConfigError(0, "preset does not apply to 2D models");
  }
  return dealias(f);
}

}  // namespace qgsaddle
