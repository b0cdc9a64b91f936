#pragma once

#include <istream>
#include <ostream>

#include <json.hpp>

namespace sapo {

// Scoring service request:
//   {id?, graph: <graph object>, trajectory: <trajectory object>,
//    k?, lambda?, eps?, group?: [outcome rewards incl. this trajectory's]}
// Response carries per-step rewards and step advantages; when a group is
// supplied, also the outcome advantage and combined advantages. Malformed
// requests produce an error response, never a crash.
nlohmann::json handle_score_request(const nlohmann::json& request);

// Newline-delimited JSON over stdin/stdout. Requests are handled by a worker
// pool; responses are emitted in request order.
void run_pipe_server(std::istream& in, std::ostream& out, int workers = 4);

// Optional HTTP transport: POST /score with the same request body.
int run_http_server(int port);

}  // namespace sapo
