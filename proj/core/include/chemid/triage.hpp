#pragma once

// Interactive triage: per-session symptom observations turned into lookup
// candidates, classifier predictions and a suggested next question.

#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "chemid/decision_tree.hpp"
#include "chemid/lookup_engine.hpp"
#include "chemid/neural_net.hpp"
#include "chemid/ssx_matrix.hpp"

namespace chemid {

enum class Observation { kUnknown, kPresent, kAbsent };

std::optional<Observation> parse_observation(std::string_view token);
std::string_view observation_name(Observation o);

/// Models shared read-only by every session. Tree and network are optional;
/// the corresponding view fields stay empty without them.
struct ModelSet {
  std::shared_ptr<const ChemicalDatabase> db;
  std::shared_ptr<const TrainedTree> tree;
  std::shared_ptr<const NetworkWeights> ann;

  /// Throws std::invalid_argument when the database is missing or the
  /// models disagree on symptom count.
  void validate() const;
  nlohmann::json metadata() const;
};

struct NextSymptom {
  std::size_t index = 0;
  std::string source;  ///< "tree" or "information_gain".

  friend bool operator==(const NextSymptom&, const NextSymptom&) = default;
};

struct CandidateView {
  CandidateList lookup_candidates;
  std::optional<std::string> tree_prediction;
  std::size_t tree_questions = 0;  ///< Splits answered along the tree path.
  std::vector<std::pair<std::string, double>> ann_topk;  ///< Posterior non-increasing.
  std::optional<NextSymptom> next_symptom;
  std::vector<std::string> notes;

  friend bool operator==(const CandidateView&, const CandidateView&) = default;
};

/// Pure function of the observation vector (one entry per symptom).
/// Lookup uses present marks only; the tree walks present/absent answers; the
/// network sees present = 1 and everything else = 0. The next question is the
/// first unanswered tree split, or, once the tree path is complete and lookup
/// still leaves several candidates, the unanswered symptom with the largest
/// deviance reduction over the candidates taken as equally likely.
CandidateView compute_view(const ModelSet& models, const std::vector<Observation>& observations,
                           std::size_t top_k = 5);

/// Best information-gain symptom over `candidates` (database indices),
/// skipping answered symptoms; empty when no symptom separates them.
std::optional<std::size_t> information_gain_symptom(const ChemicalDatabase& db,
                                                    const std::vector<std::size_t>& candidates,
                                                    const std::vector<Observation>& observations);

/// `metadata` is attached verbatim under "model".
nlohmann::json view_to_json(const CandidateView& view, const ChemicalDatabase& db, const nlohmann::json& metadata);

class SessionNotFound : public std::out_of_range {
 public:
  explicit SessionNotFound(const std::string& id) : std::out_of_range("unknown session '" + id + "'") {}
};

struct TriageOptions {
  std::chrono::seconds session_ttl{3600};
  std::size_t top_k = 5;
};

/// Thread-safe session registry. Sessions are independent; calls on one
/// session are serialised by its own lock.
class TriageService {
 public:
  using Clock = std::chrono::steady_clock;
  using ClockFn = std::function<Clock::time_point()>;

  explicit TriageService(ModelSet models, TriageOptions options = {}, ClockFn clock = Clock::now);

  const ModelSet& models() const noexcept { return models_; }
  const TriageOptions& options() const noexcept { return options_; }
  /// ModelSet::metadata(), computed once at construction.
  const nlohmann::json& metadata() const noexcept { return metadata_; }

  std::string create_session();

  /// Throws SessionNotFound, or std::out_of_range for a bad symptom index.
  CandidateView record_observation(const std::string& session_id, std::size_t symptom, Observation state);
  CandidateView get_candidates(const std::string& session_id);
  std::vector<Observation> observations(const std::string& session_id);

  std::size_t live_sessions();

 private:
  struct Session {
    std::mutex mutex;
    std::vector<Observation> observations;
    Clock::time_point last_used;
  };

  std::shared_ptr<Session> find(const std::string& id);
  void purge_expired_locked(Clock::time_point now);

  ModelSet models_;
  nlohmann::json metadata_;
  TriageOptions options_;
  ClockFn clock_;
  std::mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t counter_ = 0;
  std::uint64_t salt_;
};

struct HttpOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  ///< 0 picks a free port.
  std::string cors_origin = "*";
};

/// JSON-over-HTTP front end for TriageService.
class TriageHttpServer {
 public:
  TriageHttpServer(std::shared_ptr<TriageService> service, HttpOptions options = {});
  ~TriageHttpServer();
  TriageHttpServer(const TriageHttpServer&) = delete;
  TriageHttpServer& operator=(const TriageHttpServer&) = delete;

  /// Binds the socket; returns the bound port. Throws std::runtime_error.
  int bind();
  /// Serves until stop(); call after bind().
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace chemid
