#include "chainedbell/model_io.hpp"

#include "chainedbell/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

namespace chainedbell {

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_model(std::ostream& out, const DecompositionModel& model) {
  const ScenarioSettings& s = model.scenario();
  const std::size_t n = s.n();
  out << "chainedbell-model 1\n";
  out << "alpha " << format_real(model.state().alpha()) << '\n';
  out << "n " << n << '\n';
  out << "alice";
  for (const MeasurementAngle& t : s.alice()) out << ' ' << format_real(t.radians());
  out << "\nbob";
  for (const MeasurementAngle& t : s.bob()) out << ' ' << format_real(t.radians());
  out << "\natoms " << model.z_count() << '\n';
  for (std::size_t z = 0; z < model.z_count(); ++z) {
    out << "atom " << z << " weight " << format_real(model.weights()[z]) << '\n';
    const BehaviorBox& box = model.boxes()[z];
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        out << "p " << a << ' ' << b;
        for (int x = 0; x < 2; ++x) {
          for (int y = 0; y < 2; ++y) out << ' ' << format_real(box(a, b, x, y));
        }
        out << '\n';
      }
    }
  }
  out << "end\n";
}

std::string serialize_model(const DecompositionModel& model) {
  std::ostringstream out;
  write_model(out, model);
  return out.str();
}

namespace {

struct Token {
  std::string text;
  std::size_t column;
};

struct Line {
  std::size_t number = 0;
  std::vector<Token> tokens;
};

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::optional<Line> next() {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++line_no_;
      Line line{line_no_, {}};
      std::size_t i = 0;
      while (i < raw.size()) {
        while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t' || raw[i] == '\r')) ++i;
        if (i >= raw.size()) break;
        const std::size_t start = i;
        while (i < raw.size() && raw[i] != ' ' && raw[i] != '\t' && raw[i] != '\r') ++i;
        line.tokens.push_back({raw.substr(start, i - start), start + 1});
      }
      if (line.tokens.empty() || line.tokens.front().text.front() == '#') continue;
      return line;
    }
    return std::nullopt;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

double parse_real(const Line& line, const Token& tok) {
  double v = 0.0;
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError(line.number, tok.column, "expected a real number, got '" + tok.text + "'");
  }
  return v;
}

std::size_t parse_index(const Line& line, const Token& tok) {
  std::size_t v = 0;
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(line.number, tok.column, "expected a non-negative integer, got '" + tok.text + "'");
  }
  return v;
}

Line expect(LineReader& reader, std::string_view keyword) {
  auto line = reader.next();
  if (!line) {
    throw ParseError(reader.line_no() + 1, 1,
                     "unexpected end of file, expected '" + std::string(keyword) + "'");
  }
  if (line->tokens.front().text != keyword) {
    throw ParseError(line->number, line->tokens.front().column,
                     "expected '" + std::string(keyword) + "', got '" + line->tokens.front().text + "'");
  }
  return *line;
}

void expect_arity(const Line& line, std::size_t count, std::string_view what) {
  if (line.tokens.size() == count) return;
  const std::size_t column = line.tokens.size() > count ? line.tokens[count].column
                                                        : line.tokens.back().column;
  throw ParseError(line.number, column,
                   std::string(what) + " takes " + std::to_string(count - 1) + " value(s), got " +
                       std::to_string(line.tokens.size() - 1));
}

}  // namespace

DecompositionModel parse_model(std::istream& in, double tol) {
  LineReader reader(in);

  const Line header = expect(reader, "chainedbell-model");
  expect_arity(header, 2, "chainedbell-model");
  if (header.tokens[1].text != "1") {
    throw ParseError(header.number, header.tokens[1].column, "unsupported model format version");
  }

  const Line alpha_line = expect(reader, "alpha");
  expect_arity(alpha_line, 2, "alpha");
  const double alpha = parse_real(alpha_line, alpha_line.tokens[1]);
  if (alpha < 0.0 || alpha > 1.0) {
    throw ParseError(alpha_line.number, alpha_line.tokens[1].column, "alpha must lie in [0, 1]");
  }

  const Line n_line = expect(reader, "n");
  expect_arity(n_line, 2, "n");
  const std::size_t n = parse_index(n_line, n_line.tokens[1]);
  if (n < 2) throw ParseError(n_line.number, n_line.tokens[1].column, "n must be at least 2");

  auto read_angles = [&](std::string_view keyword) {
    const Line line = expect(reader, keyword);
    expect_arity(line, n + 1, keyword);
    std::vector<MeasurementAngle> angles;
    for (std::size_t k = 1; k <= n; ++k) angles.emplace_back(parse_real(line, line.tokens[k]));
    return angles;
  };
  auto alice = read_angles("alice");
  auto bob = read_angles("bob");

  const Line atoms_line = expect(reader, "atoms");
  expect_arity(atoms_line, 2, "atoms");
  const std::size_t z_count = parse_index(atoms_line, atoms_line.tokens[1]);
  if (z_count == 0) {
    throw ParseError(atoms_line.number, atoms_line.tokens[1].column, "atoms must be at least 1");
  }

  std::vector<double> weights;
  std::vector<BehaviorBox> boxes;
  Line last_weight_line;
  for (std::size_t z = 0; z < z_count; ++z) {
    const Line atom = expect(reader, "atom");
    if (atom.tokens.size() >= 3 && atom.tokens[2].text == "weight" && atom.tokens.size() > 4) {
      throw ParseError(atom.number, atom.tokens[4].column,
                       "weight takes a single value; per-setting weights are not allowed");
    }
    expect_arity(atom, 4, "atom");
    if (parse_index(atom, atom.tokens[1]) != z) {
      throw ParseError(atom.number, atom.tokens[1].column, "atoms must be numbered 0..Z-1 in order");
    }
    if (atom.tokens[2].text != "weight") {
      throw ParseError(atom.number, atom.tokens[2].column, "expected 'weight'");
    }
    const double w = parse_real(atom, atom.tokens[3]);
    if (w < 0.0) throw ParseError(atom.number, atom.tokens[3].column, "weights must be non-negative");
    weights.push_back(w);
    last_weight_line = atom;

    BehaviorBox box(n, n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const Line row = expect(reader, "p");
        expect_arity(row, 7, "p");
        if (parse_index(row, row.tokens[1]) != a || parse_index(row, row.tokens[2]) != b) {
          throw ParseError(row.number, row.tokens[1].column,
                           "probability rows must follow (a, b) order; expected " +
                               std::to_string(a) + " " + std::to_string(b));
        }
        double sum = 0.0;
        for (int x = 0; x < 2; ++x) {
          for (int y = 0; y < 2; ++y) {
            const Token& tok = row.tokens[static_cast<std::size_t>(3 + 2 * x + y)];
            const double v = parse_real(row, tok);
            if (v < -tol || v > 1.0 + tol) {
              throw ParseError(row.number, tok.column, "probability outside [0, 1]");
            }
            box.set(a, b, x, y, v);
            sum += v;
          }
        }
        if (std::abs(sum - 1.0) > tol) {
          throw ParseError(row.number, row.tokens[3].column,
                           "probabilities sum to " + format_real(sum) + ", expected 1");
        }
      }
    }
    boxes.push_back(std::move(box));
  }

  double total = 0.0;
  for (double w : weights) total += w;
  if (std::abs(total - 1.0) > tol) {
    throw ParseError(last_weight_line.number, last_weight_line.tokens[3].column,
                     "weights sum to " + format_real(total) + ", expected 1");
  }

  const Line end = expect(reader, "end");
  expect_arity(end, 1, "end");
  if (auto extra = reader.next()) {
    throw ParseError(extra->number, extra->tokens.front().column, "content after 'end'");
  }

  return DecompositionModel(EntangledPairState(alpha),
                            ScenarioSettings(std::move(alice), std::move(bob)),
                            std::move(weights), std::move(boxes), tol);
}

DecompositionModel parse_model(std::string_view text, double tol) {
  std::istringstream in{std::string(text)};
  return parse_model(in, tol);
}

DecompositionModel load_model(const std::filesystem::path& path, double tol) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open model file " + path.string());
  return parse_model(in, tol);
}

void save_model(const std::filesystem::path& path, const DecompositionModel& model) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write model file " + path.string());
  write_model(out, model);
  if (!out) throw Error(ErrorCode::io, "failed writing model file " + path.string());
}

}  // namespace chainedbell
