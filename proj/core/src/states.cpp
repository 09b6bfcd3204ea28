#include "qmetro/states.hpp"

#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "qmetro/error.hpp"

namespace qmetro {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_token(std::string_view token, std::string_view why) {
  std::ostringstream msg;
  msg << "invalid state spec token '" << token << "': " << why;
  throw std::invalid_argument(msg.str());
}

double parse_number(std::string_view token, std::string_view value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) bad_token(token, "not a number");
  return out;
}

int parse_integer(std::string_view token, std::string_view value) {
  int out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) bad_token(token, "not an integer");
  return out;
}

struct Param {
  std::string_view key;
  std::string_view value;
};

std::vector<Param> split_params(std::string_view token, std::string_view body) {
  std::vector<Param> params;
  while (!body.empty()) {
    const auto comma = body.find(',');
    const std::string_view item = trim(body.substr(0, comma));
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) bad_token(token, "expected key=value");
    params.push_back({trim(item.substr(0, eq)), trim(item.substr(eq + 1))});
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return params;
}

std::string_view require(std::string_view token, const std::vector<Param>& params,
                         std::string_view key) {
  std::optional<std::string_view> found;
  for (const auto& p : params) {
    if (p.key == key) {
      if (found) bad_token(token, "duplicate parameter");
      found = p.value;
    }
  }
  if (!found) bad_token(token, std::string("missing parameter ") + std::string(key));
  return *found;
}

void reject_unknown(std::string_view token, const std::vector<Param>& params,
                    std::initializer_list<std::string_view> known) {
  for (const auto& p : params) {
    bool ok = false;
    for (auto k : known) ok = ok || p.key == k;
    if (!ok) bad_token(token, "unknown parameter " + std::string(p.key));
  }
}

// Shortest text that parses back to the same double.
std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, ptr};
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("alpha must be a finite real >= 0");
}

}  // namespace

void validate(const StateSpec& spec) {
  std::visit(overloaded{
                 [](const Coherent& s) { check_alpha(s.alpha); },
                 [](const Cat& s) { check_alpha(s.alpha); },
                 [](const Ecs& s) { check_alpha(s.alpha); },
                 [](const Ucs& s) {
                   if (!(s.a >= 0.0 && s.a <= 1.0)) throw std::invalid_argument("UCS needs 0 <= a <= 1");
                   if (!(s.n_phi > 0.0) || !std::isfinite(s.n_phi))
                     throw std::invalid_argument("UCS needs n_phi > 0");
                 },
                 [](const No& s) {
                   if (s.n < 1) throw std::invalid_argument("NO state needs N >= 1");
                 },
                 [](const Noon& s) {
                   if (s.n < 1) throw std::invalid_argument("NOON state needs N >= 1");
                 },
             },
             spec);
}

StateSpec parse_state_spec(std::string_view text) {
  const std::string_view token = trim(text);
  const auto colon = token.find(':');
  if (colon == std::string_view::npos) bad_token(token, "expected kind:key=value");
  const std::string_view kind = trim(token.substr(0, colon));
  const auto params = split_params(token, token.substr(colon + 1));

  StateSpec spec = Coherent{0.0};
  if (kind == "coh" || kind == "cat" || kind == "ecs") {
    reject_unknown(token, params, {"alpha"});
    const double alpha = parse_number(token, require(token, params, "alpha"));
    if (kind == "coh") spec = Coherent{alpha};
    else if (kind == "cat") spec = Cat{alpha};
    else spec = Ecs{alpha};
  } else if (kind == "ucs") {
    reject_unknown(token, params, {"a", "nphi"});
    spec = Ucs{parse_number(token, require(token, params, "a")),
               parse_number(token, require(token, params, "nphi"))};
  } else if (kind == "no" || kind == "noon") {
    reject_unknown(token, params, {"N"});
    const int n = parse_integer(token, require(token, params, "N"));
    if (kind == "no") spec = No{n};
    else spec = Noon{n};
  } else {
    bad_token(token, "unknown state kind");
  }
  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    bad_token(token, e.what());
  }
  return spec;
}

std::vector<StateSpec> parse_state_list(std::string_view text) {
  std::vector<std::string> groups;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    if (item.empty()) bad_token(text, "empty item");
    if (item.find(':') != std::string_view::npos) {
      groups.emplace_back(item);
    } else {
      if (groups.empty()) bad_token(item, "parameter before any state kind");
      groups.back() += ',';
      groups.back() += item;
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (groups.empty()) throw std::invalid_argument("empty state list");
  std::vector<StateSpec> specs;
  specs.reserve(groups.size());
  for (const auto& g : groups) specs.push_back(parse_state_spec(g));
  return specs;
}

std::string to_string(const StateSpec& spec) {
  return std::visit(overloaded{
                        [](const Coherent& s) { return "coh:alpha=" + format_number(s.alpha); },
                        [](const Cat& s) { return "cat:alpha=" + format_number(s.alpha); },
                        [](const Ecs& s) { return "ecs:alpha=" + format_number(s.alpha); },
                        [](const Ucs& s) {
                          return "ucs:a=" + format_number(s.a) + ",nphi=" + format_number(s.n_phi);
                        },
                        [](const No& s) { return "no:N=" + std::to_string(s.n); },
                        [](const Noon& s) { return "noon:N=" + std::to_string(s.n); },
                    },
                    spec);
}

int mode_count(const StateSpec& spec) {
  return std::holds_alternative<Noon>(spec) || std::holds_alternative<Ecs>(spec) ? 2 : 1;
}

int default_cutoff(const StateSpec& spec) {
  validate(spec);
  return std::visit(overloaded{
                        [](const Coherent& s) { return cutoff_for_mean(s.alpha * s.alpha); },
                        [](const Cat& s) { return cutoff_for_mean(s.alpha * s.alpha); },
                        [](const Ecs& s) { return cutoff_for_mean(s.alpha * s.alpha); },
                        [](const Ucs& s) {
                          const double alpha = solve_alpha_of_a(s.a, s.n_phi);
                          return cutoff_for_mean(alpha * alpha);
                        },
                        [](const No& s) { return s.n; },
                        [](const Noon& s) { return s.n; },
                    },
                    spec);
}

double ecs_normalization(double alpha) { return 1.0 / std::sqrt(2.0 + 2.0 * std::exp(-alpha * alpha)); }

double cat_normalization(double alpha) {
  return 1.0 / std::sqrt(2.0 + 2.0 * std::exp(-0.5 * alpha * alpha));
}

double ucs_normalization(double a, double alpha) {
  return 1.0 / std::sqrt(1.0 + a * a + 2.0 * a * std::exp(-0.5 * alpha * alpha));
}

double solve_alpha_of_a(double a, double n_phi) {
  if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("solve_alpha_of_a needs 0 <= a <= 1");
  if (!(n_phi > 0.0)) throw std::invalid_argument("solve_alpha_of_a needs n_phi > 0");
  const auto target = [&](double x) { return n_phi * (1.0 + a * a + 2.0 * a * std::exp(-0.5 * x)); };
  // |d target / dx| = a n_phi e^{-x/2} <= 2/e on the feasible branch, so a
  // half-step damping contracts with rate <= 1/2.
  constexpr double kDamping = 0.5;
  constexpr int kMaxIterations = 500;
  double x = n_phi * (1.0 + a * a);
  for (int it = 0; it < kMaxIterations; ++it) {
    const double residual = x - target(x);
    if (std::abs(residual) <= 1e-12) return std::sqrt(x);
    x -= kDamping * residual;
  }
  std::ostringstream msg;
  msg << "alpha(a) fixed point did not converge for a=" << a << ", n_phi=" << n_phi;
  throw ConvergenceError(msg.str());
}

double cat_mean_photons(double alpha) {
  const double nc = cat_normalization(alpha);
  return nc * nc * alpha * alpha;
}

FockVector build_state(const StateSpec& spec, int cutoff) {
  validate(spec);
  return std::visit(
      overloaded{
          [&](const Coherent& s) { return coherent_vector(s.alpha, cutoff); },
          [&](const Cat& s) {
            return cat_normalization(s.alpha) *
                   (coherent_vector(s.alpha, cutoff) + FockVector::vacuum(cutoff));
          },
          [&](const Ucs& s) {
            const double alpha = solve_alpha_of_a(s.a, s.n_phi);
            return ucs_normalization(s.a, alpha) *
                   (coherent_vector(alpha, cutoff) + cplx{s.a} * FockVector::vacuum(cutoff));
          },
          [&](const No& s) {
            return std::sqrt(0.5) *
                   (FockVector::number_state(s.n, cutoff) + FockVector::vacuum(cutoff));
          },
          [&](const Noon& s) {
            const auto n = FockVector::number_state(s.n, cutoff);
            const auto vac = FockVector::vacuum(cutoff);
            return std::sqrt(0.5) * (tensor(n, vac) + tensor(vac, n));
          },
          [&](const Ecs& s) {
            const auto coh = coherent_vector(s.alpha, cutoff);
            const auto vac = FockVector::vacuum(cutoff);
            return ecs_normalization(s.alpha) * (tensor(coh, vac) + tensor(vac, coh));
          },
      },
      spec);
}

double mean_photons_through_phase(const StateSpec& spec) {
  validate(spec);
  return std::visit(overloaded{
                        [](const Coherent& s) { return s.alpha * s.alpha; },
                        [](const Cat& s) { return cat_mean_photons(s.alpha); },
                        [](const Ecs& s) {
                          const double ne = ecs_normalization(s.alpha);
                          return ne * ne * s.alpha * s.alpha;
                        },
                        [](const Ucs& s) { return s.n_phi; },
                        [](const No& s) { return 0.5 * s.n; },
                        [](const Noon& s) { return 0.5 * s.n; },
                    },
                    spec);
}

std::optional<TwoBranch> two_branch_form(const StateSpec& spec) {
  validate(spec);
  if (const auto* s = std::get_if<Coherent>(&spec)) return TwoBranch{s->alpha, 0.0};
  if (const auto* s = std::get_if<Cat>(&spec)) return TwoBranch{s->alpha, 1.0};
  if (const auto* s = std::get_if<Ucs>(&spec)) return TwoBranch{solve_alpha_of_a(s->a, s->n_phi), s->a};
  return std::nullopt;
}

}  // namespace qmetro
