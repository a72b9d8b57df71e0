#include "cirm/market_data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cirm/errors.hpp"
#include "cirm/numerics.hpp"

namespace cirm {

namespace {

constexpr double kDiscountConsistencyTol = 1e-6;
constexpr double kBpsToDecimal = 1e-4;

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& field, std::size_t line) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || field.empty()) {
    throw ParseError("invalid number '" + field + "'", line);
  }
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool looks_like_json(const std::string& text) {
  auto pos = text.find_first_not_of(" \t\r\n");
  return pos != std::string::npos && text[pos] == '{';
}

// Reads a CSV with a fixed header; calls `row(fields, line_number)` per data row.
template <class RowFn>
void read_csv(const std::string& text, const std::vector<std::string>& header, RowFn row) {
  std::stringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(ss, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = split_csv(t);
    if (!seen_header) {
      if (line_no == 1 && !t.empty() && static_cast<unsigned char>(t[0]) == 0xEF) {
        fields.front().erase(0, 3);  // UTF-8 BOM
      }
      if (fields != header) {
        std::string expected;
        for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
        throw ParseError("expected header '" + expected + "'", line_no);
      }
      seen_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    row(fields, line_no);
  }
  if (!seen_header) throw ParseError("missing header");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

SwapType parse_swap_type(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "payer" || s == "1" || s == "+1") return SwapType::Payer;
  if (s == "receiver" || s == "-1") return SwapType::Receiver;
  throw ValidationError("unknown swap type '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// DiscountCurve

DiscountCurve::DiscountCurve(std::vector<CurvePoint> points) : points_(std::move(points)) {
  if (points_.empty()) throw ValidationError("curve has no points");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!std::isfinite(p.maturity) || !std::isfinite(p.zero_rate) || !std::isfinite(p.discount)) {
      throw ValidationError("curve point " + std::to_string(i) + " is not finite");
    }
    if (p.maturity < 0.0) throw ValidationError("negative curve maturity");
    if (p.discount <= 0.0) throw ValidationError("non-positive discount factor");
    if (i > 0 && !(p.maturity > points_[i - 1].maturity)) {
      throw ValidationError("curve maturities must be strictly increasing (point " +
                            std::to_string(i) + ")");
    }
    const double implied = std::exp(-p.zero_rate * p.maturity);
    if (std::abs(implied - p.discount) > kDiscountConsistencyTol) {
      throw ValidationError("discount inconsistent with zero rate at maturity " +
                            format_double(p.maturity));
    }
  }
  if (points_.back().maturity <= 0.0) throw ValidationError("curve needs a positive maturity");

  // Natural cubic spline on (t_i, R_i): tridiagonal system for the second
  // derivatives with M_0 = M_{n-1} = 0.
  const std::size_t n = points_.size();
  second_derivs_.assign(n, 0.0);
  if (n < 3) return;
  std::vector<double> diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = points_[i].maturity - points_[i - 1].maturity;
    const double h1 = points_[i + 1].maturity - points_[i].maturity;
    diag[i] = 2.0 * (h0 + h1);
    upper[i] = h1;
    rhs[i] = 6.0 * ((points_[i + 1].zero_rate - points_[i].zero_rate) / h1 -
                    (points_[i].zero_rate - points_[i - 1].zero_rate) / h0);
  }
  // Thomas algorithm on rows 1..n-2; the sub-diagonal of row i is h_{i-1}.
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double lower = points_[i].maturity - points_[i - 1].maturity;
    const double w = lower / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    second_derivs_[i] = (rhs[i] - upper[i] * second_derivs_[i + 1]) / diag[i];
  }
}

double DiscountCurve::zero_rate(double t) const {
  if (!(t >= 0.0)) throw ExtrapolationError("curve queried at negative time");
  if (t > last_maturity()) {
    throw ExtrapolationError("curve queried at t=" + format_double(t) +
                             " beyond last knot " + format_double(last_maturity()));
  }
  const auto& p = points_;
  if (t <= p.front().maturity) return p.front().zero_rate;
  auto it = std::upper_bound(p.begin(), p.end(), t,
                             [](double v, const CurvePoint& q) { return v < q.maturity; });
  const std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - p.begin()), p.size() - 1);
  const std::size_t lo = hi - 1;
  if (t == p[hi].maturity) return p[hi].zero_rate;
  const double h = p[hi].maturity - p[lo].maturity;
  const double a = p[hi].maturity - t;
  const double b = t - p[lo].maturity;
  const double m0 = second_derivs_[lo];
  const double m1 = second_derivs_[hi];
  return m0 * a * a * a / (6.0 * h) + m1 * b * b * b / (6.0 * h) +
         (p[lo].zero_rate / h - m0 * h / 6.0) * a + (p[hi].zero_rate / h - m1 * h / 6.0) * b;
}

double DiscountCurve::discount(double t) const {
  if (t == 0.0) return 1.0;
  auto it = std::lower_bound(points_.begin(), points_.end(), t,
                             [](const CurvePoint& q, double v) { return q.maturity < v; });
  if (it != points_.end() && it->maturity == t) return it->discount;
  return std::exp(-zero_rate(t) * t);
}

// ---------------------------------------------------------------------------
// SwaptionSurface

SwaptionSurface::SwaptionSurface(std::vector<SwaptionQuote> quotes, SwapType type)
    : quotes_(std::move(quotes)), type_(type) {
  std::map<std::pair<double, double>, int> seen;
  for (auto& q : quotes_) {
    if (!(q.maturity > 0.0)) throw ValidationError("swaption maturity must be positive");
    if (!(q.tenor > 0.0)) throw ValidationError("swaption tenor must be positive");
    if (!(q.price >= 0.0)) throw ValidationError("swaption price must be non-negative");
    if (!(q.normal_vol >= 0.0)) throw ValidationError("normal vol must be non-negative");
    if (q.type != type_) throw ValidationError("all quotes of a surface must share one swap type");
    if (!seen.emplace(std::make_pair(q.maturity, q.tenor), 0).second) {
      throw ValidationError("duplicate quote at maturity " + format_double(q.maturity) +
                            ", tenor " + format_double(q.tenor));
    }
  }
  std::sort(quotes_.begin(), quotes_.end(), [](const SwaptionQuote& a, const SwaptionQuote& b) {
    return a.maturity != b.maturity ? a.maturity < b.maturity : a.tenor < b.tenor;
  });
}

std::optional<SwaptionQuote> SwaptionSurface::find(double maturity, double tenor) const {
  for (const auto& q : quotes_) {
    if (q.maturity == maturity && q.tenor == tenor) return q;
  }
  return std::nullopt;
}

std::vector<double> SwaptionSurface::maturities() const {
  std::vector<double> out;
  for (const auto& q : quotes_) out.push_back(q.maturity);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> SwaptionSurface::tenors() const {
  std::vector<double> out;
  for (const auto& q : quotes_) out.push_back(q.tenor);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Bachelier

double bachelier_price(double forward_swap_rate, double strike, double normal_vol, double expiry,
                       double annuity, SwapType type) {
  if (!(normal_vol >= 0.0)) throw DomainError("bachelier_price: negative volatility");
  if (!(expiry > 0.0)) throw DomainError("bachelier_price: expiry must be positive");
  if (!(annuity > 0.0)) throw DomainError("bachelier_price: annuity must be positive");
  const double z = sign(type);
  const double moneyness = z * (forward_swap_rate - strike);
  const double stdev = normal_vol * std::sqrt(expiry);
  if (stdev == 0.0) return annuity * std::max(moneyness, 0.0);
  const double d = (forward_swap_rate - strike) / stdev;
  return annuity * (moneyness * normal_cdf(z * d) + stdev * normal_pdf(d));
}

ForwardSwap market_forward_swap(const DiscountCurve& curve, double maturity, double tenor) {
  const int n = static_cast<int>(std::lround(tenor));
  if (n < 1 || std::abs(tenor - n) > 1e-12) {
    throw ValidationError("annual swap tenor must be a positive integer number of years");
  }
  CompensatedSum annuity;
  for (int i = 1; i <= n; ++i) annuity.add(curve.discount(maturity + i));
  const double a = annuity.value();
  return {(curve.discount(maturity) - curve.discount(maturity + n)) / a, a};
}

// ---------------------------------------------------------------------------
// I/O

DiscountCurve load_curve(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<CurvePoint> points;
  if (looks_like_json(text)) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
      for (const auto& p : j.at("points")) {
        points.push_back({p.at("maturity_years").get<double>(), p.at("zero_rate").get<double>(),
                          p.at("discount").get<double>()});
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
  } else {
    read_csv(text, {"maturity_years", "zero_rate", "discount"},
             [&](const std::vector<std::string>& f, std::size_t line) {
               points.push_back(
                   {parse_number(f[0], line), parse_number(f[1], line), parse_number(f[2], line)});
             });
  }
  return DiscountCurve(std::move(points));
}

void write_curve(const DiscountCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "maturity_years,zero_rate,discount\n";
  for (const auto& p : curve.points()) {
    out << format_double(p.maturity) << ',' << format_double(p.zero_rate) << ','
        << format_double(p.discount) << '\n';
  }
}

SwaptionSurface load_surface(const std::filesystem::path& path, SwapType type,
                             const DiscountCurve* curve) {
  const std::string text = read_file(path);
  std::vector<SwaptionQuote> quotes;
  auto add = [&](double maturity, double tenor, double strike, double vol_bps,
                 std::optional<double> price, std::size_t line) {
    SwaptionQuote q{maturity, tenor, strike, vol_bps * kBpsToDecimal, 0.0, type};
    if (price) {
      q.price = *price;
    } else {
      if (!curve) throw ParseError("missing price and no curve to compute it", line);
      const auto fwd = market_forward_swap(*curve, maturity, tenor);
      q.price = bachelier_price(fwd.rate, strike, q.normal_vol, maturity, fwd.annuity, type);
    }
    quotes.push_back(q);
  };
  if (looks_like_json(text)) {
    try {
      const auto j = nlohmann::json::parse(text);
      for (const auto& q : j.at("quotes")) {
        std::optional<double> price;
        if (q.contains("price") && !q.at("price").is_null()) price = q.at("price").get<double>();
        add(q.at("maturity_years").get<double>(), q.at("tenor_years").get<double>(),
            q.at("strike").get<double>(), q.at("normal_vol_bps").get<double>(), price, 0);
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
  } else {
    read_csv(text, {"maturity_years", "tenor_years", "strike", "normal_vol_bps", "price"},
             [&](const std::vector<std::string>& f, std::size_t line) {
               std::optional<double> price;
               if (!f[4].empty()) price = parse_number(f[4], line);
               add(parse_number(f[0], line), parse_number(f[1], line), parse_number(f[2], line),
                   parse_number(f[3], line), price, line);
             });
  }
  return SwaptionSurface(std::move(quotes), type);
}

void write_surface(const SwaptionSurface& surface, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "maturity_years,tenor_years,strike,normal_vol_bps,price\n";
  for (const auto& q : surface.quotes()) {
    out << format_double(q.maturity) << ',' << format_double(q.tenor) << ','
        << format_double(q.strike) << ',' << format_double(q.normal_vol / kBpsToDecimal) << ','
        << format_double(q.price) << '\n';
  }
}

}  // namespace cirm
