#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "shufflemix/rng.hpp"
#include "shufflemix/shuffle_spec.hpp"

namespace shufflemix {

using Card = std::uint32_t;      // 1..n
using Position = std::size_t;    // 1..n, 1 = top of the deck

enum class DeckOrder { kIdentity, kReversed };

// A permutation of cards 1..n with O(1) lookups in both directions.
//
// Storage is a circular buffer with a moving head: moving the card at position
// q to the top shifts min(q - 1, n - q) cards, so bottom-k shuffles cost O(k)
// per step regardless of n.
class Deck {
 public:
  explicit Deck(std::size_t n, DeckOrder order = DeckOrder::kIdentity);
  // by_position[j-1] is the card at position j; must be a permutation of 1..n.
  static Deck from_positions(std::span<const Card> by_position);

  std::size_t size() const noexcept { return slots_.size(); }
  Card card_at(Position pos) const;
  Position position_of(Card card) const;

  // Moves the card at pos to position 1; cards above it shift down by one.
  void move_to_top(Position pos);

  std::vector<Card> by_position() const;
  // by_card()[c-1] is the position of card c.
  std::vector<Position> by_card() const;

  friend bool operator==(const Deck& a, const Deck& b);

 private:
  Deck() = default;
  std::size_t slot(Position pos) const noexcept { return (head_ + pos - 1) % slots_.size(); }
  void put(Position pos, Card card) noexcept {
    const std::size_t s = slot(pos);
    slots_[s] = card;
    slot_of_[card] = s;
  }

  std::vector<Card> slots_;          // buffer slot -> card
  std::vector<std::size_t> slot_of_; // card -> buffer slot (index 0 unused)
  std::size_t head_ = 0;             // slot holding position 1
};

Deck make_deck(std::size_t n, DeckOrder order);
Deck apply_move_to_top(Deck deck, Position pos);

struct StepResult {
  Position position;  // position the moved card came from
  Card card;          // card moved to the top
};

// One step of the shuffle: a card identity (move-to-front) or a position
// (position-weighted) is drawn with the spec's weights and moved to the top.
StepResult sample_step(const ShuffleSpec& spec, Deck& deck, RngStream& rng);

// Uniformly random deck (Fisher-Yates driven by rng).
Deck random_deck(std::size_t n, RngStream& rng);

}  // namespace shufflemix
