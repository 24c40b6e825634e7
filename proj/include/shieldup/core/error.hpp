#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shieldup {

// Every failure surfaced by the library carries one of these codes. The CLI
// and HTTP layers map codes to exit statuses and response codes.
enum class Errc {
  // content model
  Syntax,
  Schema,
  Graph,
  // narrative engine
  LevelLocked,
  InvalidChoice,
  SessionCompleted,
  NotCompleted,
  LengthMismatch,
  DivergentHistory,
  // sdat
  InsufficientItems,
  SplitViolation,
  MissingResponse,
  DuplicateResponse,
  UnknownItem,
  InvalidResponse,
  StorylineMismatch,
  WrongForm,
  // psychometrics
  InvalidMatrix,
  TooFewItems,
  ZeroTotalVariance,
  ZeroVariance,
  DegenerateItem,
  FactorCountTooLarge,
  InfeasibleConstraint,
  // analysis
  RankDeficient,
  MissingField,
  DegenerateResidual,
  InsufficientFollowup,
  // trial
  InvalidDemographics,
  AlreadyAssigned,
  NotAssigned,
  UnknownParticipant,
  OutOfOrder,
  FollowupTooEarly,
  FollowupWindowClosed,
  NegativeDuration,
  CorruptLog,
  // simulation / configuration
  InvalidConfig,
  Io,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::Syntax: return "SyntaxError";
    case Errc::Schema: return "SchemaError";
    case Errc::Graph: return "GraphError";
    case Errc::LevelLocked: return "LevelLocked";
    case Errc::InvalidChoice: return "InvalidChoice";
    case Errc::SessionCompleted: return "SessionCompleted";
    case Errc::NotCompleted: return "NotCompleted";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::DivergentHistory: return "DivergentHistory";
    case Errc::InsufficientItems: return "InsufficientItems";
    case Errc::SplitViolation: return "SplitViolation";
    case Errc::MissingResponse: return "MissingResponse";
    case Errc::DuplicateResponse: return "DuplicateResponse";
    case Errc::UnknownItem: return "UnknownItem";
    case Errc::InvalidResponse: return "InvalidResponse";
    case Errc::StorylineMismatch: return "StorylineMismatch";
    case Errc::WrongForm: return "WrongForm";
    case Errc::InvalidMatrix: return "InvalidMatrix";
    case Errc::TooFewItems: return "TooFewItems";
    case Errc::ZeroTotalVariance: return "ZeroTotalVariance";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::DegenerateItem: return "DegenerateItem";
    case Errc::FactorCountTooLarge: return "FactorCountTooLarge";
    case Errc::InfeasibleConstraint: return "InfeasibleConstraint";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::MissingField: return "MissingField";
    case Errc::DegenerateResidual: return "DegenerateResidual";
    case Errc::InsufficientFollowup: return "InsufficientFollowup";
    case Errc::InvalidDemographics: return "InvalidDemographics";
    case Errc::AlreadyAssigned: return "AlreadyAssigned";
    case Errc::NotAssigned: return "NotAssigned";
    case Errc::UnknownParticipant: return "UnknownParticipant";
    case Errc::OutOfOrder: return "OutOfOrder";
    case Errc::FollowupTooEarly: return "FollowupTooEarly";
    case Errc::FollowupWindowClosed: return "FollowupWindowClosed";
    case Errc::NegativeDuration: return "NegativeDuration";
    case Errc::CorruptLog: return "CorruptLog";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::Io: return "IoError";
  }
  return "Unknown";
}

// `subject` names the offending entity: a node id, a field name, an item id,
// a byte offset. It is what tests and diagnostics match on.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string subject, const std::string& detail = {})
      : std::runtime_error(compose(code, subject, detail)),
        code_(code),
        subject_(std::move(subject)) {}

  Errc code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  static std::string compose(Errc code, const std::string& subject,
                             const std::string& detail) {
    std::string msg(to_string(code));
    msg += "(" + subject + ")";
    if (!detail.empty()) msg += ": " + detail;
    return msg;
  }

  Errc code_;
  std::string subject_;
};

}  // namespace shieldup
