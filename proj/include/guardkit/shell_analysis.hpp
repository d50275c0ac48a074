#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace guardkit::shell {

// Exact command text as submitted for execution, byte-preserving.
struct RawCommand {
  std::string text;
};

struct Redirection {
  std::string op;      // "<", ">", ">>", "<&", ">&", optionally fd-prefixed ("2>")
  std::string target;
};

struct SimpleCommand {
  std::vector<std::string> argv;
  std::vector<std::pair<std::string, std::string>> env_assignments;
  std::vector<Redirection> redirections;
  // Indices of argv words that carry runtime parameter expansion ($VAR, ${VAR});
  // their value is invisible to lexical analysis.
  std::vector<std::size_t> expansion_words;

  bool word_has_expansion(std::size_t index) const;
};

enum class Connector {
  Sequence,    // ;
  AndIf,       // &&
  OrIf,        // ||
  Pipe,        // |
  Background,  // &
  Newline,
};

const char* connector_token(Connector c);

enum class FailureReason {
  line_continuation,
  command_substitution,
  process_substitution,
  unbalanced_quote,
  dangerous_env_assignment,
  unsupported_construct,
};

const char* failure_reason_name(FailureReason r);

struct CommandChain {
  std::vector<SimpleCommand> commands;
  std::vector<Connector> connectors;  // size == commands.size() - 1
};

struct AnalysisFailure {
  FailureReason reason;
  std::size_t location;  // byte offset of the offending construct
};

// Either a chain of simple commands or a fail-closed analysis failure.
class CommandAnalysis {
 public:
  static CommandAnalysis chain(CommandChain c) { return CommandAnalysis(std::move(c)); }
  static CommandAnalysis failure(FailureReason r, std::size_t loc) {
    return CommandAnalysis(AnalysisFailure{r, loc});
  }

  bool is_chain() const { return std::holds_alternative<CommandChain>(outcome_); }
  bool is_failure() const { return !is_chain(); }
  const CommandChain& as_chain() const { return std::get<CommandChain>(outcome_); }
  const AnalysisFailure& as_failure() const { return std::get<AnalysisFailure>(outcome_); }

 private:
  explicit CommandAnalysis(CommandChain c) : outcome_(std::move(c)) {}
  explicit CommandAnalysis(AnalysisFailure f) : outcome_(f) {}
  std::variant<CommandChain, AnalysisFailure> outcome_;
};

struct AnalysisPolicy {
  // Env-prefix assignments to these names fail analysis outright.
  std::vector<std::string> dangerous_env_vars = default_dangerous_env_vars();

  static std::vector<std::string> default_dangerous_env_vars();
};

// True iff the text contains a backslash immediately followed by LF or CR,
// in any quoting context. Context-free byte scan; runs before tokenization.
bool has_shell_line_continuation(const RawCommand& raw);

// Tokenize under POSIX single/double-quote semantics and split into a chain
// of simple commands. Fails closed on every construct whose runtime
// interpretation diverges from its lexical appearance.
// Throws std::invalid_argument on empty input (usage error, not a failure).
CommandAnalysis analyze(const RawCommand& raw, const AnalysisPolicy& policy = {});

}  // namespace guardkit::shell
