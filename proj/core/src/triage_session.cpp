#include "chemid/triage.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>

#include "chemid/random.hpp"

namespace chemid {

std::optional<Observation> parse_observation(std::string_view token) {
  if (token == "present") return Observation::kPresent;
  if (token == "absent") return Observation::kAbsent;
  if (token == "unknown") return Observation::kUnknown;
  return std::nullopt;
}

std::string_view observation_name(Observation o) {
  switch (o) {
    case Observation::kPresent:
      return "present";
    case Observation::kAbsent:
      return "absent";
    case Observation::kUnknown:
      break;
  }
  return "unknown";
}

void ModelSet::validate() const {
  if (!db) throw std::invalid_argument("triage service needs a chemical database");
  if (tree && tree->symptom_count != db->symptom_count()) {
    throw std::invalid_argument("tree symptom count does not match the database");
  }
  if (ann && ann->input_dim > db->symptom_count()) {
    throw std::invalid_argument("network input width exceeds the database symptom count");
  }
}

nlohmann::json ModelSet::metadata() const {
  nlohmann::json m{{"db_hash", db ? db->content_hash() : std::string()},
                   {"chemicals", db ? db->size() : 0},
                   {"symptoms", db ? db->symptom_count() : 0}};
  m["tree_depth"] = tree ? nlohmann::json(tree->depth) : nlohmann::json(nullptr);
  if (ann) {
    m["ann_dims"] = {ann->input_dim, ann->hidden_dim, ann->output_dim};
  } else {
    m["ann_dims"] = nullptr;
  }
  return m;
}

std::optional<std::size_t> information_gain_symptom(const ChemicalDatabase& db,
                                                    const std::vector<std::size_t>& candidates,
                                                    const std::vector<Observation>& observations) {
  const std::size_t m = candidates.size();
  if (m < 2) return std::nullopt;
  // Each candidate is its own class with one sample, so class histograms are
  // all ones and only the child sizes vary.
  const double parent = deviance(std::vector<std::size_t>(m, 1), m);
  std::optional<std::size_t> best;
  double best_gain = 0.0;
  for (std::size_t s = 0; s < db.symptom_count(); ++s) {
    if (observations[s] != Observation::kUnknown) continue;
    std::size_t ones = 0;
    for (auto c : candidates) ones += db[c].profile.test(s) ? 1 : 0;
    const std::size_t zeros = m - ones;
    if (ones == 0 || zeros == 0) continue;
    const double child = (static_cast<double>(ones) * deviance(std::vector<std::size_t>(ones, 1), ones) +
                          static_cast<double>(zeros) * deviance(std::vector<std::size_t>(zeros, 1), zeros)) /
                         static_cast<double>(m);
    const double gain = parent - child;
    if (gain > best_gain + 1e-12) {
      best_gain = gain;
      best = s;
    }
  }
  return best;
}

CandidateView compute_view(const ModelSet& models, const std::vector<Observation>& observations, std::size_t top_k) {
  const ChemicalDatabase& db = *models.db;
  if (observations.size() != db.symptom_count()) throw std::invalid_argument("observation vector has wrong width");

  SymptomProfile present(db.symptom_count());
  std::map<std::size_t, bool> answers;
  for (std::size_t s = 0; s < observations.size(); ++s) {
    if (observations[s] == Observation::kPresent) {
      present.set(s);
      answers.emplace(s, true);
    } else if (observations[s] == Observation::kAbsent) {
      answers.emplace(s, false);
    }
  }

  CandidateView view;
  const std::vector<std::size_t> candidates = lookup_indices(db, present);
  view.lookup_candidates.query_popcount = present.count();
  for (auto i : candidates) view.lookup_candidates.names.push_back(db[i].name);

  if (models.tree) {
    const QuestionStep step = question_path(*models.tree, answers);
    if (const auto* ask = std::get_if<AskSymptom>(&step)) {
      view.next_symptom = NextSymptom{ask->symptom, "tree"};
      view.tree_questions = ask->depth;
    } else {
      const auto& id = std::get<Identified>(step);
      view.tree_prediction = id.chemical;
      view.tree_questions = id.questions;
    }
  }
  if (!view.next_symptom) {
    if (auto s = information_gain_symptom(db, candidates, observations)) {
      view.next_symptom = NextSymptom{*s, "information_gain"};
    }
  }

  if (models.ann) {
    const auto& w = *models.ann;
    const AnnPrediction p = predict_ann(w, present);
    std::vector<std::size_t> order(w.output_dim);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t k = std::min(top_k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double pa = p.posterior(static_cast<Eigen::Index>(a));
                        const double pb = p.posterior(static_cast<Eigen::Index>(b));
                        return pa > pb || (pa == pb && a < b);
                      });
    for (std::size_t i = 0; i < k; ++i) {
      view.ann_topk.emplace_back(w.classes[order[i]], p.posterior(static_cast<Eigen::Index>(order[i])));
    }
    view.notes.push_back("network inputs treat unknown symptoms as absent; it was trained on complete profiles");
  }
  return view;
}

nlohmann::json view_to_json(const CandidateView& view, const ChemicalDatabase& db, const nlohmann::json& metadata) {
  nlohmann::json j;
  j["lookup_candidates"] = {{"count", view.lookup_candidates.names.size()},
                            {"query_popcount", view.lookup_candidates.query_popcount},
                            {"names", view.lookup_candidates.names}};
  j["tree_prediction"] = view.tree_prediction ? nlohmann::json(*view.tree_prediction) : nlohmann::json(nullptr);
  j["tree_questions"] = view.tree_questions;
  nlohmann::json topk = nlohmann::json::array();
  for (const auto& [name, p] : view.ann_topk) topk.push_back({{"chemical", name}, {"posterior", p}});
  j["ann_topk"] = std::move(topk);
  if (view.next_symptom) {
    j["next_symptom"] = {{"index", view.next_symptom->index},
                         {"name", db.symptom_names()[view.next_symptom->index]},
                         {"source", view.next_symptom->source}};
  } else {
    j["next_symptom"] = nullptr;
  }
  j["notes"] = view.notes;
  j["model"] = metadata;
  return j;
}

// ---------------------------------------------------------------------------
// TriageService

TriageService::TriageService(ModelSet models, TriageOptions options, ClockFn clock)
    : models_(std::move(models)), options_(options), clock_(std::move(clock)) {
  models_.validate();
  metadata_ = models_.metadata();
  std::random_device rd;
  salt_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string TriageService::create_session() {
  const auto now = clock_();
  std::lock_guard lock(mutex_);
  purge_expired_locked(now);
  std::string id;
  do {
    const std::uint64_t a = combine_seeds({salt_, counter_++});
    const std::uint64_t b = mix64(a ^ salt_);
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(a),
                  static_cast<unsigned long long>(b));
    id = buf;
  } while (sessions_.contains(id));
  auto session = std::make_shared<Session>();
  session->observations.assign(models_.db->symptom_count(), Observation::kUnknown);
  session->last_used = now;
  sessions_.emplace(id, std::move(session));
  return id;
}

std::shared_ptr<TriageService::Session> TriageService::find(const std::string& id) {
  const auto now = clock_();
  std::lock_guard lock(mutex_);
  purge_expired_locked(now);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionNotFound(id);
  return it->second;
}

void TriageService::purge_expired_locked(Clock::time_point now) {
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    // last_used is only written under the session lock; a racing update can
    // at worst keep a session alive one extra sweep.
    std::unique_lock session_lock(it->second->mutex, std::try_to_lock);
    if (session_lock.owns_lock() && now - it->second->last_used > options_.session_ttl) {
      session_lock.unlock();
      it = sessions_.erase(it);
    } else {
      ++it;
    }
  }
}

CandidateView TriageService::record_observation(const std::string& session_id, std::size_t symptom,
                                                Observation state) {
  auto session = find(session_id);
  if (symptom >= models_.db->symptom_count()) {
    throw std::out_of_range("symptom index " + std::to_string(symptom) + " out of range");
  }
  std::lock_guard lock(session->mutex);
  session->observations[symptom] = state;
  session->last_used = clock_();
  return compute_view(models_, session->observations, options_.top_k);
}

CandidateView TriageService::get_candidates(const std::string& session_id) {
  auto session = find(session_id);
  std::lock_guard lock(session->mutex);
  session->last_used = clock_();
  return compute_view(models_, session->observations, options_.top_k);
}

std::vector<Observation> TriageService::observations(const std::string& session_id) {
  auto session = find(session_id);
  std::lock_guard lock(session->mutex);
  return session->observations;
}

std::size_t TriageService::live_sessions() {
  const auto now = clock_();
  std::lock_guard lock(mutex_);
  purge_expired_locked(now);
  return sessions_.size();
}

}  // namespace chemid
