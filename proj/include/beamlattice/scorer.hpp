#ifndef BEAMLATTICE_SCORER_HPP
#define BEAMLATTICE_SCORER_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace beamlattice {

// Attention-decoder contract: a normalized log-prob vector over C + {eos}
// (eos last) given the utterance id and the token prefix so far. The engine
// only ever extends prefixes by one token per step, so implementations may
// cache incremental state; queries must be deterministic and safe to issue
// concurrently from multiple decoding workers.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual int num_tokens() const = 0;  // |C|
  virtual std::vector<double> score(const std::string& utterance_id,
                                    const std::vector<int>& prefix) const = 0;
};

// log(1/(|C|+1)) for every symbol, prefix-independent.
class UniformScorer : public Scorer {
 public:
  explicit UniformScorer(int num_tokens);
  int num_tokens() const override { return num_tokens_; }
  std::vector<double> score(const std::string& id,
                            const std::vector<int>& prefix) const override;

 private:
  int num_tokens_;
};

// n-gram lookup table keyed by the last (order-1) prefix tokens; missing
// contexts fall back to uniform.
class TableScorer : public Scorer {
 public:
  TableScorer(int num_tokens, int order);
  int num_tokens() const override { return num_tokens_; }
  int order() const { return order_; }
  // Vector must have |C|+1 normalized entries; throws otherwise.
  void add_entry(const std::vector<int>& context, std::vector<double> logp);
  std::vector<double> score(const std::string& id,
                            const std::vector<int>& prefix) const override;
  const std::map<std::vector<int>, std::vector<double>>& entries() const {
    return table_;
  }

 private:
  int num_tokens_;
  int order_;
  std::map<std::vector<int>, std::vector<double>> table_;
};

// Repetition pathology driver: puts p_loop on one token, spreading the rest
// (eos included) uniformly, so greedy decoding repeats forever.
class LoopScorer : public Scorer {
 public:
  LoopScorer(int num_tokens, int loop_token, double p_loop);
  int num_tokens() const override { return num_tokens_; }
  std::vector<double> score(const std::string& id,
                            const std::vector<int>& prefix) const override;

 private:
  int num_tokens_;
  int loop_token_;
  double p_loop_;
};

// Throws std::runtime_error unless v has expected_size entries with
// |logsumexp| <= 1e-6.
void check_normalized(const std::vector<double>& v, size_t expected_size,
                      const std::string& what);

// Table-scorer JSON file:
//   {"order": int, "num_tokens": int,
//    "entries": [{"ctx": [int], "logp": [float]}]}
std::unique_ptr<TableScorer> load_table_scorer(const std::string& path);
void save_table_scorer(const std::string& path, const TableScorer& scorer);

// Parses a CLI scorer spec: "uniform" | "table:PATH" | "loop:TOKEN:P".
std::unique_ptr<Scorer> make_scorer(const std::string& spec, int num_tokens);

}  // namespace beamlattice

#endif
