#ifndef PBCMDP_ENGINE_HPP
#define PBCMDP_ENGINE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbcmdp/translator.hpp"

namespace pbcmdp {

/// Total value assignment over the signature's timed constants, plus the
/// truth set over utility atoms. Totality means uniqueness/existence of
/// values holds by construction.
struct Interpretation {
  std::vector<int> values;        // one value index per constant
  std::vector<bool> utility_set;  // one flag per utility atom

  std::vector<int> project(const std::vector<int>& constants) const {
    std::vector<int> out;
    out.reserve(constants.size());
    for (int c : constants) out.push_back(values[static_cast<std::size_t>(c)]);
    return out;
  }
};

struct StableModelRecord {
  Interpretation interpretation;
  double log_weight = 0.0;
  double probability = 0.0;
  double utility = 0.0;
};

struct QueryResult {
  double probability = 0.0;
  std::size_t support = 0;  // satisfying stable models
};

struct NoStableModel : std::runtime_error {
  NoStableModel() : std::runtime_error("program has no stable model") {}
};

struct InfeasibleQuery : std::runtime_error {
  explicit InfeasibleQuery(const std::string& what)
      : std::runtime_error(what) {}
};

struct ResourceGuard : std::runtime_error {
  explicit ResourceGuard(const std::string& what) : std::runtime_error(what) {}
};

struct EnumerationLimits {
  std::uint64_t max_nodes = 200'000'000;  // search nodes before giving up
  std::uint64_t max_models = 2'000'000;
};

/// Ferraris reduct of `f` relative to `I`: every maximal subformula not
/// satisfied by I becomes bottom, satisfied negations become top. The result
/// is a positive formula over atoms true in I.
Formula reduct(const Formula& f, const Interpretation& I,
               const GroundSignature& sig);

/// Sum of the values of utility atoms true in I.
double utility(const Interpretation& I, const GroundSignature& sig);

/// Exact enumeration plus cached conditional queries over one program.
///
/// Implementation note: candidates are generated by backtracking over
/// constants in signature order with three pruning rules -- a hard rule whose
/// body is definitely true and head definitely false kills the branch; a
/// true atom all of whose potential deriving rules have definitely-false
/// bodies kills the branch; a definitely-true body with a single-atom head
/// forces the head value. Survivors get the full reduct-minimality check, so
/// the pruning only has to be sound, not tight.
class Inference {
 public:
  explicit Inference(GroundProgram program, EnumerationLimits limits = {});

  const GroundProgram& program() const { return program_; }

  /// All stable models, canonically ordered by their value vectors, with
  /// probabilities normalized over the set. Throws NoStableModel if empty.
  const std::vector<StableModelRecord>& models();

  bool has_models();

  /// P(query | evidence); throws InfeasibleQuery on zero-probability
  /// evidence.
  QueryResult query_probability(const Formula& query, const Formula& evidence);

  double probability(const Formula& f);

  /// Expected utility of A per the conditional-expectation definition;
  /// throws InfeasibleQuery when A has zero probability.
  double expected_utility(const Formula& condition);

 private:
  void enumerate();

  GroundProgram program_;
  EnumerationLimits limits_;
  bool enumerated_ = false;
  std::vector<StableModelRecord> models_;
};

/// One-shot enumeration helper.
std::vector<StableModelRecord> enumerate_stable_models(
    const GroundProgram& program, EnumerationLimits limits = {});

}  // namespace pbcmdp

#endif
