#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qvc {

// Append-only record of classical broadcasts within one protocol round.
// Secrets (subset choices, bases, keys) must not be announced before the
// receiving party acknowledges receipt of the quantum transmission; the
// transcript enforces that ordering.
class Transcript {
 public:
  struct Entry {
    std::string sender;
    int round = 0;
    std::string tag;
    std::vector<std::uint8_t> payload;
  };

  void acknowledge_receipt(const std::string& sender) {
    entries_.push_back({sender, round_, "receipt-ack", {}});
    receipt_acknowledged_ = true;
  }

  // Announcements tagged post-receipt may only appear after a receipt
  // acknowledgment; violating the order is a protocol bug, not a runtime
  // condition, hence the hard error.
  void announce(const std::string& sender, const std::string& tag,
                std::vector<std::uint8_t> payload, bool requires_receipt = false) {
    if (requires_receipt && !receipt_acknowledged_)
      throw std::logic_error("transcript: announcement of '" + tag +
                             "' before receipt acknowledgment");
    entries_.push_back({sender, round_, tag, std::move(payload)});
  }

  void next_round() {
    ++round_;
    receipt_acknowledged_ = false;
  }

  bool receipt_acknowledged() const { return receipt_acknowledged_; }
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
  int round_ = 0;
  bool receipt_acknowledged_ = false;
};

}  // namespace qvc
