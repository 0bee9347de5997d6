#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "pcwinter/contribution_tree.hpp"

namespace pcwinter {

// Mutable coalition that only grows. One session serves one permutation.
class CoalitionSession {
 public:
  virtual ~CoalitionSession() = default;

  // Adds a player. Sessions must accept any insertion order; a player whose
  // ancestors are missing simply cannot influence the utility yet.
  virtual void insert(PlayerIndex p) = 0;
  // Utility of the current coalition.
  virtual double value() = 0;
};

// Cooperative game over the players of a contribution tree.
class TreeGame {
 public:
  virtual ~TreeGame() = default;

  virtual std::size_t num_players() const = 0;
  virtual std::unique_ptr<CoalitionSession> new_session() const = 0;
};

// Game given by an explicit set function over membership vectors.
class SetFunctionGame final : public TreeGame {
 public:
  using Function = std::function<double(const std::vector<bool>& members)>;

  SetFunctionGame(std::size_t num_players, Function fn)
      : num_players_(num_players), fn_(std::move(fn)) {}

  std::size_t num_players() const override { return num_players_; }
  std::unique_ptr<CoalitionSession> new_session() const override;

  double operator()(const std::vector<bool>& members) const { return fn_(members); }

 private:
  std::size_t num_players_;
  Function fn_;
};

}  // namespace pcwinter
