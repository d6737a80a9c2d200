#include "shufflemix/deck.hpp"

#include <numeric>
#include <string>

#include "shufflemix/errors.hpp"

namespace shufflemix {

Deck::Deck(std::size_t n, DeckOrder order) {
  if (n == 0) throw InvalidArgument("Deck: n must be at least 1");
  slots_.resize(n);
  slot_of_.assign(n + 1, 0);
  for (std::size_t j = 0; j < n; ++j) {
    const Card c = order == DeckOrder::kIdentity ? static_cast<Card>(j + 1) : static_cast<Card>(n - j);
    slots_[j] = c;
    slot_of_[c] = j;
  }
}

Deck Deck::from_positions(std::span<const Card> by_position) {
  const std::size_t n = by_position.size();
  if (n == 0) throw InvalidArgument("Deck: n must be at least 1");
  Deck d;
  d.slots_.assign(by_position.begin(), by_position.end());
  d.slot_of_.assign(n + 1, n);
  for (std::size_t j = 0; j < n; ++j) {
    const Card c = by_position[j];
    if (c < 1 || c > n || d.slot_of_[c] != n) {
      throw InvalidArgument("Deck: by_position is not a permutation of 1.." + std::to_string(n));
    }
    d.slot_of_[c] = j;
  }
  return d;
}

Card Deck::card_at(Position pos) const {
  if (pos < 1 || pos > size()) throw InvalidArgument("Deck: position " + std::to_string(pos) + " out of range");
  return slots_[slot(pos)];
}

Position Deck::position_of(Card card) const {
  const std::size_t n = size();
  if (card < 1 || card > n) throw InvalidArgument("Deck: card " + std::to_string(card) + " out of range");
  return (slot_of_[card] + n - head_) % n + 1;
}

void Deck::move_to_top(Position pos) {
  const std::size_t n = size();
  if (pos < 1 || pos > n) throw InvalidArgument("move_to_top: position " + std::to_string(pos) + " out of range");
  if (pos == 1) return;

  if (pos - 1 <= n - pos) {
    // Shift positions 1..pos-1 down by one.
    const Card moved = slots_[slot(pos)];
    for (Position j = pos; j > 1; --j) put(j, slots_[slot(j - 1)]);
    put(1, moved);
    return;
  }

  // Rotate the head back one slot: every card moves down one position and the
  // old bottom card wraps to position 1. Then shift old positions pos+1..n back up.
  head_ = (head_ + n - 1) % n;
  if (pos == n) return;
  const Card moved = slots_[slot(pos + 1)];
  const Card old_bottom = slots_[slot(1)];
  for (Position j = pos + 1; j < n; ++j) put(j, slots_[slot(j + 1)]);
  put(n, old_bottom);
  put(1, moved);
}

std::vector<Card> Deck::by_position() const {
  std::vector<Card> out(size());
  for (Position j = 1; j <= size(); ++j) out[j - 1] = slots_[slot(j)];
  return out;
}

std::vector<Position> Deck::by_card() const {
  std::vector<Position> out(size());
  for (Card c = 1; c <= size(); ++c) out[c - 1] = position_of(c);
  return out;
}

bool operator==(const Deck& a, const Deck& b) {
  if (a.size() != b.size()) return false;
  for (Position j = 1; j <= a.size(); ++j) {
    if (a.slots_[a.slot(j)] != b.slots_[b.slot(j)]) return false;
  }
  return true;
}

Deck make_deck(std::size_t n, DeckOrder order) { return Deck(n, order); }

Deck apply_move_to_top(Deck deck, Position pos) {
  deck.move_to_top(pos);
  return deck;
}

StepResult sample_step(const ShuffleSpec& spec, Deck& deck, RngStream& rng) {
  if (spec.size() != deck.size()) {
    throw InvalidArgument("sample_step: spec has " + std::to_string(spec.size()) + " weights but deck has " +
                          std::to_string(deck.size()) + " cards");
  }
  StepResult step{};
  if (spec.mode() == ShuffleMode::kMoveToFront) {
    step.card = static_cast<Card>(spec.sample(rng));
    step.position = deck.position_of(step.card);
  } else {
    step.position = spec.sample(rng);
    step.card = deck.card_at(step.position);
  }
  deck.move_to_top(step.position);
  return step;
}

Deck random_deck(std::size_t n, RngStream& rng) {
  std::vector<Card> cards(n);
  std::iota(cards.begin(), cards.end(), Card{1});
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.uniform_index(i);
    std::swap(cards[i - 1], cards[j]);
  }
  return Deck::from_positions(cards);
}

}  // namespace shufflemix
