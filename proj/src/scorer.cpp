#include "beamlattice/scorer.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "beamlattice/logmath.hpp"

namespace beamlattice {

void check_normalized(const std::vector<double>& v, size_t expected_size,
                      const std::string& what) {
  if (v.size() != expected_size)
    throw std::runtime_error(what + ": wrong vector size");
  double m = -HUGE_VAL;
  for (double x : v) m = std::max(m, x);
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  double lse = m + std::log(s);
  if (!(std::abs(lse) <= 1e-6)) {
    std::ostringstream os;
    os << what << ": vector not normalized (logsumexp=" << lse << ")";
    throw std::runtime_error(os.str());
  }
}

UniformScorer::UniformScorer(int num_tokens) : num_tokens_(num_tokens) {
  if (num_tokens < 1) throw std::invalid_argument("UniformScorer: |C| < 1");
}

std::vector<double> UniformScorer::score(const std::string&,
                                         const std::vector<int>&) const {
  return std::vector<double>(num_tokens_ + 1,
                             -std::log(static_cast<double>(num_tokens_ + 1)));
}

TableScorer::TableScorer(int num_tokens, int order)
    : num_tokens_(num_tokens), order_(order) {
  if (num_tokens < 1) throw std::invalid_argument("TableScorer: |C| < 1");
  if (order < 1) throw std::invalid_argument("TableScorer: order < 1");
}

void TableScorer::add_entry(const std::vector<int>& context,
                            std::vector<double> logp) {
  check_normalized(logp, static_cast<size_t>(num_tokens_) + 1,
                   "TableScorer entry");
  table_[context] = std::move(logp);
}

std::vector<double> TableScorer::score(const std::string&,
                                       const std::vector<int>& prefix) const {
  std::vector<int> ctx;
  size_t n = std::min<size_t>(prefix.size(), order_ - 1);
  ctx.assign(prefix.end() - n, prefix.end());
  auto it = table_.find(ctx);
  if (it != table_.end()) return it->second;
  return std::vector<double>(num_tokens_ + 1,
                             -std::log(static_cast<double>(num_tokens_ + 1)));
}

LoopScorer::LoopScorer(int num_tokens, int loop_token, double p_loop)
    : num_tokens_(num_tokens), loop_token_(loop_token), p_loop_(p_loop) {
  if (num_tokens < 1) throw std::invalid_argument("LoopScorer: |C| < 1");
  if (loop_token < 0 || loop_token >= num_tokens)
    throw std::invalid_argument("LoopScorer: loop token out of range");
  if (!(p_loop > 0.5 && p_loop < 1.0))
    throw std::invalid_argument("LoopScorer: p_loop must be in (0.5, 1)");
}

std::vector<double> LoopScorer::score(const std::string&,
                                      const std::vector<int>&) const {
  // Remainder spread over the other |C|-1 tokens plus eos.
  double rest = std::log((1.0 - p_loop_) / num_tokens_);
  std::vector<double> v(num_tokens_ + 1, rest);
  v[loop_token_] = std::log(p_loop_);
  return v;
}

std::unique_ptr<TableScorer> load_table_scorer(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open scorer file: " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed scorer file " + path + ": " +
                             e.what());
  }
  if (!j.contains("order") || !j.contains("num_tokens") ||
      !j.contains("entries"))
    throw std::runtime_error("malformed scorer file " + path +
                             ": missing field");
  auto scorer = std::make_unique<TableScorer>(j["num_tokens"].get<int>(),
                                              j["order"].get<int>());
  for (const auto& e : j["entries"]) {
    scorer->add_entry(e["ctx"].get<std::vector<int>>(),
                      e["logp"].get<std::vector<double>>());
  }
  return scorer;
}

void save_table_scorer(const std::string& path, const TableScorer& scorer) {
  nlohmann::json j;
  j["order"] = scorer.order();
  j["num_tokens"] = scorer.num_tokens();
  j["entries"] = nlohmann::json::array();
  for (const auto& [ctx, logp] : scorer.entries())
    j["entries"].push_back({{"ctx", ctx}, {"logp", logp}});
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write scorer file: " + path);
  os << j.dump() << "\n";
}

std::unique_ptr<Scorer> make_scorer(const std::string& spec, int num_tokens) {
  if (spec == "uniform") return std::make_unique<UniformScorer>(num_tokens);
  if (spec.rfind("table:", 0) == 0) {
    auto scorer = load_table_scorer(spec.substr(6));
    if (scorer->num_tokens() != num_tokens)
      throw std::runtime_error("table scorer vocabulary does not match grids");
    return scorer;
  }
  if (spec.rfind("loop:", 0) == 0) {
    std::string rest = spec.substr(5);
    auto colon = rest.find(':');
    if (colon == std::string::npos)
      throw std::runtime_error("loop scorer spec must be loop:TOKEN:P");
    int token = std::stoi(rest.substr(0, colon));
    double p = std::stod(rest.substr(colon + 1));
    return std::make_unique<LoopScorer>(num_tokens, token, p);
  }
  throw std::runtime_error("unknown scorer spec: " + spec);
}

}  // namespace beamlattice
