#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace classroom_ai {

enum class ErrorCode {
  invalid_config,
  illegal_action,
  unknown_actor,
  replay_divergence,
  malformed_action,
  unknown_reference,
  cycle_detected,
  missing_input_signal,
  unknown_input_signal,
  pool_size_mismatch,
  empty_card_set,
  wrong_phase,
  conflicting_card,
  empty_training_set,
  empty_spec,
  out_of_range_rating,
  duplicate_feedback,
  missing_rejection_reason,
  wrong_game_kind,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_config: return "invalid-config";
    case ErrorCode::illegal_action: return "illegal-action";
    case ErrorCode::unknown_actor: return "unknown-actor";
    case ErrorCode::replay_divergence: return "replay-divergence";
    case ErrorCode::malformed_action: return "malformed-action";
    case ErrorCode::unknown_reference: return "unknown-reference";
    case ErrorCode::cycle_detected: return "cycle-detected";
    case ErrorCode::missing_input_signal: return "missing-input-signal";
    case ErrorCode::unknown_input_signal: return "unknown-input-signal";
    case ErrorCode::pool_size_mismatch: return "pool-size-mismatch";
    case ErrorCode::empty_card_set: return "empty-card-set";
    case ErrorCode::wrong_phase: return "wrong-phase";
    case ErrorCode::conflicting_card: return "conflicting-card";
    case ErrorCode::empty_training_set: return "empty-training-set";
    case ErrorCode::empty_spec: return "empty-spec";
    case ErrorCode::out_of_range_rating: return "out-of-range-rating";
    case ErrorCode::duplicate_feedback: return "duplicate-feedback";
    case ErrorCode::missing_rejection_reason: return "missing-rejection-reason";
    case ErrorCode::wrong_game_kind: return "wrong-game-kind";
  }
  return "unknown";
}

/// Every engine failure carries a stable machine-readable code; the message
/// is for humans.
class EngineError : public std::runtime_error {
 public:
  EngineError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace classroom_ai
