#include "gridforge/qseries_io.hpp"

#include <cctype>

#include "gridforge/error.hpp"

namespace gridforge {

std::string coeff_to_string(const Coeff& c) { return c.get_str(10); }

Coeff coeff_from_string(const std::string& s) {
  Coeff c;
  if (s.empty() || c.set_str(s, 10) != 0 || c.get_den() == 0) {
    throw DomainError("malformed rational: '" + s + "'");
  }
  c.canonicalize();
  return c;
}

std::string to_text(const QSeries& s) {
  std::string out;
  for (const auto& t : s.terms()) {
    const bool negative = sgn(t.coeff) < 0;
    const Coeff mag = abs(t.coeff);
    if (out.empty()) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    const bool unit = mag == 1;
    if (t.exp == 0) {
      out += coeff_to_string(mag);
      continue;
    }
    if (!unit) out += coeff_to_string(mag) + "*";
    out += "q";
    if (t.exp != 1) out += "^" + std::to_string(t.exp);
  }
  if (!s.is_exact()) {
    if (!out.empty()) out += " + ";
    out += "O(q^" + std::to_string(s.prec()) + ")";
  } else if (out.empty()) {
    out = "0";
  }
  return out;
}

namespace {

class TextParser {
 public:
  explicit TextParser(std::string_view text) : text_(text) {}

  QSeries parse() {
    std::vector<Term> terms;
    std::int64_t prec = QSeries::kExact;
    skip_ws();
    bool first = true;
    while (pos_ < text_.size()) {
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = get() == '-' ? -1 : 1;
        skip_ws();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      first = false;
      if (peek() == 'O') {
        if (sign < 0) fail("negative O-term");
        ++pos_;
        expect('(');
        expect('q');
        prec = 1;
        if (peek() == '^') {
          ++pos_;
          prec = integer();
        }
        expect(')');
        skip_ws();
        if (pos_ != text_.size()) fail("trailing input after O-term");
        break;
      }
      Coeff c = 1;
      bool have_coeff = false;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        c = rational();
        have_coeff = true;
        skip_ws();
      }
      std::int64_t e = 0;
      if (have_coeff && peek() == '*') {
        ++pos_;
        skip_ws();
        if (peek() != 'q') fail("expected 'q' after '*'");
      }
      if (peek() == 'q') {
        ++pos_;
        e = 1;
        if (peek() == '^') {
          ++pos_;
          e = integer();
        }
      } else if (!have_coeff) {
        fail("expected a term");
      }
      terms.push_back({e, c * sign});
      skip_ws();
    }
    if (terms.empty() && prec == QSeries::kExact) fail("empty series");
    for (const auto& t : terms) {
      if (t.exp >= prec) fail("term at or beyond the O-term");
    }
    return QSeries::from_terms(std::move(terms), prec);
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  char get() { return text_[pos_++]; }
  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }
  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
    skip_ws();
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw DomainError("cannot parse series at offset " + std::to_string(pos_) +
                      ": " + what + " in \"" + std::string(text_) + "\"");
  }
  std::int64_t integer() {
    std::size_t start = pos_;
    if (peek() == '-' || peek() == '+') ++pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    const std::string digits(text_.substr(start, pos_ - start));
    if (digits.empty() || digits == "-" || digits == "+") fail("expected integer");
    try {
      return std::stoll(digits);
    } catch (const std::exception&) {
      fail("integer out of range");
    }
  }
  Coeff rational() {
    std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (peek() == '/') {
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    return coeff_from_string(std::string(text_.substr(start, pos_ - start)));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

QSeries parse_text(std::string_view text) { return TextParser(text).parse(); }

nlohmann::json to_json(const QSeries& s) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& t : s.terms()) {
    coeffs.push_back({t.exp, coeff_to_string(t.coeff)});
  }
  nlohmann::json j;
  j["prec"] = s.is_exact() ? nlohmann::json(nullptr) : nlohmann::json(s.prec());
  j["coeffs"] = std::move(coeffs);
  return j;
}

QSeries from_json(const nlohmann::json& j) {
  try {
    const std::int64_t prec = j.at("prec").is_null()
                                  ? QSeries::kExact
                                  : j.at("prec").get<std::int64_t>();
    std::vector<Term> terms;
    for (const auto& entry : j.at("coeffs")) {
      if (!entry.is_array() || entry.size() != 2) {
        throw DomainError("coefficient entry must be [exponent, \"num/den\"]");
      }
      terms.push_back({entry[0].get<std::int64_t>(),
                       coeff_from_string(entry[1].get<std::string>())});
    }
    return QSeries::from_terms(std::move(terms), prec);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed series JSON: ") + e.what());
  }
}

}  // namespace gridforge
