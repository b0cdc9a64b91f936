#include "sapo/service.hpp"

#include <cmath>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "sapo/advantage.hpp"
#include "sapo/entity_match.hpp"
#include "sapo/json_io.hpp"
#include "sapo/trajectory.hpp"

namespace sapo {

using nlohmann::json;

namespace {

json error_response(const json& request, const std::string& code, const std::string& message) {
  json out = {{"error", {{"code", code}, {"message", message}}}};
  if (request.is_object() && request.contains("id")) out["id"] = request["id"];
  return out;
}

}  // namespace

json handle_score_request(const json& request) {
  try {
    if (!request.is_object()) {
      return error_response(request, "ParseError", "request is not a JSON object");
    }
    if (!request.contains("graph")) {
      return error_response(request, "ParseError", "request has no graph");
    }
    if (!request.contains("trajectory")) {
      return error_response(request, "ParseError", "request has no trajectory");
    }

    const double k = request.value("k", 2.0);
    const double lambda = request.value("lambda", 0.5);
    const double eps = request.value("eps", kDefaultNormEps);
    MatchOptions options;
    options.plural_fold = request.value("plural_fold", false);
    options.word_boundaries = request.value("word_boundaries", true);

    const ErGraph graph = graph_from_json(request["graph"]);
    const Lexicon lexicon = build_lexicon(graph);
    const Trajectory traj = trajectory_from_json(request["trajectory"]);

    const StepRewardSeries series = score_trajectory(traj, graph, lexicon, k, options);
    const EntityNode& answer = graph.nodes()[graph.answer_index()];
    const OutcomeReward outcome =
        outcome_reward(traj, answer.canonical_label, answer.aliases);

    std::vector<double> r_g;
    for (const StepReward& s : series.steps) r_g.push_back(s.r_g);
    const std::vector<double> step_adv = step_advantages(r_g, eps);

    std::optional<double> outcome_adv;
    if (request.contains("group") && !request["group"].is_null()) {
      const std::vector<double> group = request["group"].get<std::vector<double>>();
      if (group.size() < 2) {
        throw Error(Err::GroupTooSmall, "group must list at least 2 outcome rewards");
      }
      // The trajectory's own reward is normalized against the supplied group.
      double mean = 0.0;
      for (double g : group) mean += g;
      mean /= static_cast<double>(group.size());
      double ss = 0.0;
      for (double g : group) ss += (g - mean) * (g - mean);
      const double std_dev = std::sqrt(ss / static_cast<double>(group.size()));
      outcome_adv = (outcome.scalar() - mean) / (std_dev + eps);
    }

    json steps = json::array();
    for (size_t t = 0; t < series.steps.size(); ++t) {
      const StepReward& s = series.steps[t];
      json step = {{"r_cite", jnum(s.r_cite)},
                   {"r_ret", jnum(s.r_ret)},
                   {"r_g", jnum(s.r_g)},
                   {"step_advantage", jnum(step_adv[t])}};
      if (s.step_distance) {
        step["d"] = s.step_distance->reachable() ? json(s.step_distance->hops)
                                                 : json("unreachable");
      } else {
        step["d"] = nullptr;
      }
      if (outcome_adv) {
        step["combined"] =
            jnum(combine_advantages(*outcome_adv, {step_adv[t]}, lambda).front());
      }
      steps.push_back(std::move(step));
    }

    json response = {{"trajectory_id", traj.trajectory_id},
                     {"steps", steps},
                     {"outcome",
                      {{"correctness", outcome.correctness},
                       {"format_valid", outcome.format_valid},
                       {"scalar", jnum(outcome.scalar())}}},
                     {"errors", json::array()}};
    if (outcome_adv) response["outcome_advantage"] = jnum(*outcome_adv);
    if (request.contains("id")) response["id"] = request["id"];
    return response;
  } catch (const Error& e) {
    return error_response(request, err_name(e.code()), e.what());
  } catch (const json::exception& e) {
    return error_response(request, "ParseError", e.what());
  } catch (const std::exception& e) {
    return error_response(request, "InternalError", e.what());
  }
}

void run_pipe_server(std::istream& in, std::ostream& out, int workers) {
  struct Task {
    uint64_t seq;
    std::string line;
  };

  std::mutex mu;
  std::condition_variable work_cv;
  std::condition_variable emit_cv;
  std::deque<Task> queue;
  std::map<uint64_t, std::string> ready;
  bool done_reading = false;
  uint64_t submitted = 0;
  uint64_t next_emit = 0;

  auto worker = [&]() {
    for (;;) {
      Task task;
      {
        std::unique_lock<std::mutex> lock(mu);
        work_cv.wait(lock, [&] { return !queue.empty() || done_reading; });
        if (queue.empty()) return;
        task = std::move(queue.front());
        queue.pop_front();
      }
      json request;
      json response;
      try {
        request = json::parse(task.line);
        response = handle_score_request(request);
      } catch (const json::exception& e) {
        response = error_response(json(), "ParseError", e.what());
      }
      {
        std::lock_guard<std::mutex> lock(mu);
        ready.emplace(task.seq, response.dump());
      }
      emit_cv.notify_one();
    }
  };

  std::vector<std::thread> pool;
  const int n = std::max(1, workers);
  pool.reserve(n);
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);

  std::thread emitter([&]() {
    for (;;) {
      std::string line;
      {
        std::unique_lock<std::mutex> lock(mu);
        emit_cv.wait(lock, [&] {
          return ready.count(next_emit) > 0 || (done_reading && next_emit >= submitted);
        });
        auto it = ready.find(next_emit);
        if (it == ready.end()) return;  // every submitted request was emitted
        line = std::move(it->second);
        ready.erase(it);
        ++next_emit;
      }
      out << line << '\n';
      out.flush();
    }
  });

  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    {
      std::lock_guard<std::mutex> lock(mu);
      queue.push_back(Task{submitted++, std::move(line)});
    }
    work_cv.notify_one();
    line.clear();
  }
  {
    std::lock_guard<std::mutex> lock(mu);
    done_reading = true;
  }
  work_cv.notify_all();
  for (auto& t : pool) t.join();
  emit_cv.notify_all();
  emitter.join();
}

}  // namespace sapo
