#include "guardkit/shell_analysis.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>

namespace guardkit::shell {

namespace {

constexpr std::size_t npos = std::string::npos;

bool is_name_start(char c) {
  return c == '_' || std::isalpha(static_cast<unsigned char>(c)) != 0;
}

bool is_name_char(char c) {
  return c == '_' || std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool is_valid_name(const std::string& s) {
  if (s.empty() || !is_name_start(s[0])) return false;
  return std::all_of(s.begin() + 1, s.end(), is_name_char);
}

// Characters that begin a parameter expansion after '$'.
bool starts_expansion(char c) {
  if (is_name_char(c)) return true;
  switch (c) {
    case '{': case '?': case '#': case '$': case '@': case '*': case '!': case '-':
      return true;
    default:
      return false;
  }
}

// Words that the shell treats as grammar, not commands, when unquoted in
// command position. Unmodeled semantics; analysis fails closed on them.
bool is_reserved_word(const std::string& w) {
  static const std::array<const char*, 20> kReserved = {
      "if", "then", "else", "elif", "fi", "for", "while", "until", "do",
      "done", "case", "esac", "function", "select", "coproc", "time",
      "{", "}", "!", "[[",
  };
  return std::any_of(kReserved.begin(), kReserved.end(),
                     [&](const char* r) { return w == r; });
}

struct WordState {
  std::string text;
  std::size_t start_offset = 0;
  bool active = false;            // a word exists (may be the empty quoted word)
  bool has_expansion = false;
  bool leading_unquoted_tilde = false;
  bool any_quoted = false;        // any char arrived quoted or escaped
  std::size_t first_quoted_pos = npos;   // index in text of first quoted char
  std::size_t first_unquoted_eq = npos;  // index in text of first unquoted '='
  // Brace-expansion automaton over unquoted chars: '{' then ',' then '}'.
  int brace_state = 0;

  void begin(std::size_t offset) {
    if (!active) {
      active = true;
      start_offset = offset;
    }
  }
  void put_unquoted(char c) {
    if (c == '=' && first_unquoted_eq == npos) first_unquoted_eq = text.size();
    if (c == '{' && brace_state == 0) brace_state = 1;
    else if (c == ',' && brace_state == 1) brace_state = 2;
    else if (c == '}' && brace_state == 2) brace_state = 3;
    text.push_back(c);
  }
  void put_quoted(char c) {
    any_quoted = true;
    if (first_quoted_pos == npos) first_quoted_pos = text.size();
    text.push_back(c);
  }
  bool is_assignment() const {
    if (first_unquoted_eq == npos || first_unquoted_eq == 0) return false;
    if (first_unquoted_eq >= first_quoted_pos) return false;
    return is_valid_name(text.substr(0, first_unquoted_eq));
  }
  void reset() { *this = WordState{}; }
};

class Analyzer {
 public:
  Analyzer(const std::string& text, const AnalysisPolicy& policy)
      : s_(text), policy_(policy) {}

  CommandAnalysis run() {
    while (i_ <= s_.size()) {
      if (failed_) return *failed_;
      if (i_ == s_.size()) {
        finish_input();
        break;
      }
      step();
    }
    if (failed_) return *failed_;
    return CommandAnalysis::chain(std::move(chain_));
  }

 private:
  enum class Quote { None, Single, Double };

  const std::string& s_;
  const AnalysisPolicy& policy_;
  std::size_t i_ = 0;
  Quote quote_ = Quote::None;
  std::size_t quote_open_ = 0;

  WordState word_;
  SimpleCommand current_;
  std::vector<std::size_t> expansion_indices_;
  std::optional<std::string> pending_redir_op_;
  std::size_t pending_redir_offset_ = 0;

  CommandChain chain_;
  std::optional<Connector> pending_connector_;
  bool have_commands_ = false;

  std::optional<CommandAnalysis> failed_;

  void fail(FailureReason r, std::size_t loc) {
    if (!failed_) failed_ = CommandAnalysis::failure(r, loc);
  }

  char cur() const { return s_[i_]; }
  char peek(std::size_t k = 1) const {
    return i_ + k < s_.size() ? s_[i_ + k] : '\0';
  }

  void step() {
    switch (quote_) {
      case Quote::None: step_unquoted(); break;
      case Quote::Single: step_single(); break;
      case Quote::Double: step_double(); break;
    }
  }

  void step_single() {
    char c = cur();
    if (c == '\'') {
      quote_ = Quote::None;
      i_++;
      return;
    }
    word_.put_quoted(c);
    i_++;
  }

  void step_double() {
    char c = cur();
    switch (c) {
      case '"':
        quote_ = Quote::None;
        i_++;
        return;
      case '\\': {
        // Recognized escapes inside double quotes: \ " $ ` only.
        char n = peek();
        if (n == '\\' || n == '"' || n == '$' || n == '`') {
          word_.put_quoted(n);
          i_ += 2;
        } else {
          word_.put_quoted('\\');
          i_++;
        }
        return;
      }
      case '$':
        handle_dollar(/*quoted=*/true);
        return;
      case '`':
        fail(FailureReason::command_substitution, i_);
        return;
      default:
        word_.put_quoted(c);
        i_++;
        return;
    }
  }

  void step_unquoted() {
    char c = cur();
    switch (c) {
      case '\'':
        word_.begin(i_);
        quote_ = Quote::Single;
        quote_open_ = i_;
        i_++;
        return;
      case '"':
        word_.begin(i_);
        quote_ = Quote::Double;
        quote_open_ = i_;
        i_++;
        return;
      case '\\': {
        if (i_ + 1 >= s_.size()) {
          fail(FailureReason::unsupported_construct, i_);
          return;
        }
        word_.begin(i_);
        word_.put_quoted(s_[i_ + 1]);
        i_ += 2;
        return;
      }
      case ' ':
      case '\t':
        end_word();
        i_++;
        return;
      case '\n':
      case '\r':
        on_newline();
        i_++;
        if (c == '\r' && i_ < s_.size() && s_[i_] == '\n') i_++;
        return;
      case '#':
        if (!word_.active) {
          while (i_ < s_.size() && s_[i_] != '\n' && s_[i_] != '\r') i_++;
          return;
        }
        word_.put_unquoted(c);
        i_++;
        return;
      case ';':
        on_connector(Connector::Sequence, 1);
        return;
      case '&':
        if (peek() == '&') {
          on_connector(Connector::AndIf, 2);
        } else {
          on_connector(Connector::Background, 1);
        }
        return;
      case '|':
        if (peek() == '|') {
          on_connector(Connector::OrIf, 2);
        } else {
          on_connector(Connector::Pipe, 1);
        }
        return;
      case '<':
      case '>':
        handle_redirection();
        return;
      case '$':
        handle_dollar(/*quoted=*/false);
        return;
      case '`':
        fail(FailureReason::command_substitution, i_);
        return;
      case '(':
      case ')':
        fail(FailureReason::unsupported_construct, i_);
        return;
      case '~':
        if (!word_.active) word_.leading_unquoted_tilde = true;
        word_.begin(i_);
        word_.put_unquoted(c);
        i_++;
        return;
      default:
        word_.begin(i_);
        word_.put_unquoted(c);
        i_++;
        return;
    }
  }

  void handle_dollar(bool quoted) {
    char n = peek();
    if (n == '(') {
      if (peek(2) == '(') {
        fail(FailureReason::unsupported_construct, i_);  // arithmetic expansion
      } else {
        fail(FailureReason::command_substitution, i_);
      }
      return;
    }
    word_.begin(i_);
    auto put = [&](char ch) { quoted ? word_.put_quoted(ch) : word_.put_unquoted(ch); };
    if (n == '{') {
      // Consume the whole ${...} verbatim so its braces stay out of the
      // brace-expansion automaton.
      std::size_t j = i_ + 2;
      int depth = 1;
      std::string inner;
      while (j < s_.size() && depth > 0) {
        if (s_[j] == '`' || (s_[j] == '$' && j + 1 < s_.size() && s_[j + 1] == '(')) {
          fail(FailureReason::command_substitution, j);
          return;
        }
        if (s_[j] == '{') depth++;
        if (s_[j] == '}') depth--;
        if (depth > 0) inner.push_back(s_[j]);
        j++;
      }
      if (depth != 0) {
        fail(FailureReason::unsupported_construct, i_);
        return;
      }
      put('$');
      put('{');
      for (char ch : inner) word_.put_quoted(ch);  // keep out of assignment/brace tracking
      put('}');
      word_.has_expansion = true;
      i_ = j;
      return;
    }
    if (starts_expansion(n)) {
      put('$');
      word_.has_expansion = true;
      i_++;
      return;
    }
    put('$');  // bare dollar, literal
    i_++;
  }

  void handle_redirection() {
    char c = cur();
    std::size_t off = i_;
    if (peek() == '(') {
      fail(FailureReason::process_substitution, i_);
      return;
    }
    // Attached pure-digit word is a file-descriptor prefix (2>, 1>&).
    std::string fd_prefix;
    if (word_.active && !word_.any_quoted && !word_.text.empty() &&
        std::all_of(word_.text.begin(), word_.text.end(),
                    [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)) != 0; })) {
      fd_prefix = word_.text;
      off = word_.start_offset;
      word_.reset();
    } else if (word_.active) {
      end_word();
      if (failed_) return;
    }
    std::string op;
    op.push_back(c);
    i_++;
    if (c == '<' && cur_is('<')) {
      fail(FailureReason::unsupported_construct, off);  // here-doc
      return;
    }
    if (c == '>' && cur_is('>')) {
      op.push_back('>');
      i_++;
    }
    if (cur_is('&')) {
      op.push_back('&');
      i_++;
    }
    if (pending_redir_op_) {
      fail(FailureReason::unsupported_construct, off);
      return;
    }
    pending_redir_op_ = fd_prefix + op;
    pending_redir_offset_ = off;
  }

  bool cur_is(char c) const { return i_ < s_.size() && s_[i_] == c; }

  // Completes the current word, if any, into the current simple command.
  void end_word() {
    if (!word_.active || failed_) {
      word_.reset();
      return;
    }
    WordState w = std::move(word_);
    word_.reset();

    if (pending_redir_op_) {
      current_.redirections.push_back({*pending_redir_op_, w.text});
      pending_redir_op_.reset();
      return;
    }
    if (current_.argv.empty() && w.is_assignment()) {
      std::string name = w.text.substr(0, w.first_unquoted_eq);
      std::string value = w.text.substr(w.first_unquoted_eq + 1);
      for (const auto& dangerous : policy_.dangerous_env_vars) {
        if (name == dangerous) {
          fail(FailureReason::dangerous_env_assignment, w.start_offset);
          return;
        }
      }
      current_.env_assignments.emplace_back(std::move(name), std::move(value));
      return;
    }
    if (current_.argv.empty()) {
      if (w.leading_unquoted_tilde) {
        fail(FailureReason::unsupported_construct, w.start_offset);
        return;
      }
      if (!w.any_quoted && is_reserved_word(w.text)) {
        fail(FailureReason::unsupported_construct, w.start_offset);
        return;
      }
      if (w.brace_state == 3) {
        fail(FailureReason::unsupported_construct, w.start_offset);
        return;
      }
    } else if (w.brace_state == 3) {
      fail(FailureReason::unsupported_construct, w.start_offset);
      return;
    }
    if (w.has_expansion) expansion_indices_.push_back(current_.argv.size());
    current_.argv.push_back(std::move(w.text));
  }

  bool current_has_content() const {
    return !current_.argv.empty() || !current_.env_assignments.empty() ||
           !current_.redirections.empty();
  }

  void finalize_command(std::size_t offset) {
    if (failed_) return;
    if (pending_redir_op_) {
      fail(FailureReason::unsupported_construct, pending_redir_offset_);
      return;
    }
    if (current_.argv.empty()) {
      // Bare assignments or bare redirections mutate shell state we do not
      // model; fail closed.
      fail(FailureReason::unsupported_construct, offset);
      return;
    }
    current_.expansion_words = std::move(expansion_indices_);
    expansion_indices_.clear();
    if (have_commands_) chain_.connectors.push_back(*pending_connector_);
    pending_connector_.reset();
    chain_.commands.push_back(std::move(current_));
    current_ = SimpleCommand{};
    have_commands_ = true;
  }

  void on_connector(Connector c, std::size_t token_len) {
    std::size_t off = i_;
    end_word();
    if (failed_) return;
    if (!current_has_content()) {
      fail(FailureReason::unsupported_construct, off);
      return;
    }
    finalize_command(off);
    if (failed_) return;
    pending_connector_ = c;
    i_ += token_len;
  }

  void on_newline() {
    std::size_t off = i_;
    end_word();
    if (failed_) return;
    if (current_has_content()) {
      finalize_command(off);
      if (failed_) return;
      pending_connector_ = Connector::Newline;
    }
    // A newline with nothing pending is a blank line or a continuation
    // after an explicit connector; both are silent.
  }

  void finish_input() {
    if (quote_ != Quote::None) {
      fail(FailureReason::unbalanced_quote, quote_open_);
      return;
    }
    std::size_t off = s_.size();
    end_word();
    if (failed_) return;
    if (current_has_content()) {
      finalize_command(off);
      if (failed_) return;
    } else if (pending_connector_) {
      switch (*pending_connector_) {
        case Connector::Sequence:
        case Connector::Background:
        case Connector::Newline:
          break;  // trailing ';', '&', newline are complete commands
        case Connector::AndIf:
        case Connector::OrIf:
        case Connector::Pipe:
          fail(FailureReason::unsupported_construct, off);  // dangling operator
          return;
      }
    }
    if (chain_.commands.empty()) {
      fail(FailureReason::unsupported_construct, 0);
    }
  }
};

}  // namespace

bool SimpleCommand::word_has_expansion(std::size_t index) const {
  return std::find(expansion_words.begin(), expansion_words.end(), index) !=
         expansion_words.end();
}

const char* connector_token(Connector c) {
  switch (c) {
    case Connector::Sequence: return ";";
    case Connector::AndIf: return "&&";
    case Connector::OrIf: return "||";
    case Connector::Pipe: return "|";
    case Connector::Background: return "&";
    case Connector::Newline: return "\n";
  }
  return "?";
}

const char* failure_reason_name(FailureReason r) {
  switch (r) {
    case FailureReason::line_continuation: return "line_continuation";
    case FailureReason::command_substitution: return "command_substitution";
    case FailureReason::process_substitution: return "process_substitution";
    case FailureReason::unbalanced_quote: return "unbalanced_quote";
    case FailureReason::dangerous_env_assignment: return "dangerous_env_assignment";
    case FailureReason::unsupported_construct: return "unsupported_construct";
  }
  return "?";
}

std::vector<std::string> AnalysisPolicy::default_dangerous_env_vars() {
  return {"LD_PRELOAD", "LD_LIBRARY_PATH", "DYLD_INSERT_LIBRARIES", "PATH", "IFS"};
}

bool has_shell_line_continuation(const RawCommand& raw) {
  const std::string& t = raw.text;
  for (std::size_t i = 0; i + 1 < t.size(); i++) {
    if (t[i] == '\\' && (t[i + 1] == '\n' || t[i + 1] == '\r')) return true;
  }
  return false;
}

CommandAnalysis analyze(const RawCommand& raw, const AnalysisPolicy& policy) {
  std::size_t b = raw.text.find_first_not_of(" \t\n\r\f\v");
  if (b == npos) {
    throw std::invalid_argument("empty command text");
  }
  if (has_shell_line_continuation(raw)) {
    std::size_t loc = 0;
    for (std::size_t i = 0; i + 1 < raw.text.size(); i++) {
      if (raw.text[i] == '\\' && (raw.text[i + 1] == '\n' || raw.text[i + 1] == '\r')) {
        loc = i;
        break;
      }
    }
    return CommandAnalysis::failure(FailureReason::line_continuation, loc);
  }
  return Analyzer(raw.text, policy).run();
}

}  // namespace guardkit::shell
