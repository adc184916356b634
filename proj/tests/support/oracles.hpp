#pragma once

// Independent reference implementations the tests check the library against.
// Everything here is deliberately written the direct, slow way.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fairal/model.hpp"

namespace testsupport {

inline double rel_err(double got, double want) {
  double scale = std::max({1e-8, std::abs(got), std::abs(want)});
  return std::abs(got - want) / scale;
}

/// Brute-force uncertainty decomposition: plain accumulation in long double,
/// entropy difference form, no reordering tricks.
struct BaldReference {
  std::vector<double> total;
  std::vector<double> aleatoric;
  std::vector<double> mi;
};

inline BaldReference bald_reference(const fairal::McPredictions& preds) {
  std::size_t T = preds.passes, N = preds.samples, C = preds.classes;
  BaldReference ref;
  for (std::size_t n = 0; n < N; ++n) {
    std::vector<long double> mean(C, 0.0L);
    long double aleatoric = 0.0L;
    for (std::size_t t = 0; t < T; ++t) {
      long double h = 0.0L;
      for (std::size_t c = 0; c < C; ++c) {
        long double p = preds.at(t, n, c);
        mean[c] += p;
        if (p > 0.0L) h -= p * std::log(p);
      }
      aleatoric += h;
    }
    aleatoric /= static_cast<long double>(T);
    long double total = 0.0L;
    for (std::size_t c = 0; c < C; ++c) {
      mean[c] /= static_cast<long double>(T);
      if (mean[c] > 0.0L) total -= mean[c] * std::log(mean[c]);
    }
    long double mi = total - aleatoric;
    if (mi < 0.0L) mi = 0.0L;
    ref.total.push_back(static_cast<double>(total));
    ref.aleatoric.push_back(static_cast<double>(aleatoric));
    ref.mi.push_back(static_cast<double>(mi));
  }
  return ref;
}

/// Random probability table for score tests: T x N x C rows drawn from a
/// symmetric Dirichlet via normalized exponentials.
inline fairal::McPredictions random_predictions(std::size_t T, std::size_t N,
                                                std::size_t C,
                                                fairal::RngStream& rng) {
  fairal::McPredictions preds;
  preds.passes = T;
  preds.samples = N;
  preds.classes = C;
  preds.p.resize(T * N * C);
  for (std::size_t row = 0; row < T * N; ++row) {
    double sum = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
      double e = -std::log(1.0 - rng.uniform01());
      preds.p[row * C + c] = e;
      sum += e;
    }
    for (std::size_t c = 0; c < C; ++c) preds.p[row * C + c] /= sum;
  }
  return preds;
}

/// Minimal XML well-formedness scan: tag/attribute syntax, balanced nesting.
/// Good enough to police generated SVG; not a general parser.
inline bool xml_well_formed(const std::string& text, std::string* error) {
  std::vector<std::string> stack;
  auto fail = [&](const std::string& message) {
    if (error) *error = message;
    return false;
  };
  std::size_t i = 0, n = text.size();
  while (i < n) {
    if (text[i] != '<') {
      if (text[i] == '>') return fail("stray '>'");
      ++i;
      continue;
    }
    std::size_t close = text.find('>', i);
    if (close == std::string::npos) return fail("unterminated tag");
    std::string tag = text.substr(i + 1, close - i - 1);
    i = close + 1;
    if (tag.empty()) return fail("empty tag");
    if (tag[0] == '?' || tag[0] == '!') continue;  // declaration or comment
    bool closing = tag[0] == '/';
    bool self_closing = tag.back() == '/';
    if (closing && self_closing) return fail("malformed tag: " + tag);
    std::string body = tag.substr(closing ? 1 : 0,
                                  tag.size() - (closing ? 1 : 0) -
                                      (self_closing ? 1 : 0));
    std::size_t name_end = body.find_first_of(" \t\r\n");
    std::string name = body.substr(0, name_end);
    if (name.empty()) return fail("nameless tag: " + tag);
    // Attributes must be name="value" pairs.
    std::size_t quote_count = 0;
    for (char c : body) {
      if (c == '"') ++quote_count;
    }
    if (quote_count % 2 != 0) return fail("unbalanced quotes in: " + tag);
    if (closing) {
      if (stack.empty()) return fail("close without open: " + name);
      if (stack.back() != name) {
        return fail("mismatched close: " + name + " vs " + stack.back());
      }
      stack.pop_back();
    } else if (!self_closing) {
      stack.push_back(name);
    }
  }
  if (!stack.empty()) return fail("unclosed tag: " + stack.back());
  return true;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(current);
  return fields;
}

}  // namespace testsupport
