#include <httplib.h>

#include "sapo/service.hpp"

namespace sapo {

int run_http_server(int port) {
  httplib::Server server;
  server.Post("/score", [](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json request;
    nlohmann::json response;
    try {
      request = nlohmann::json::parse(req.body);
      response = handle_score_request(request);
    } catch (const nlohmann::json::exception& e) {
      response = {{"error", {{"code", "ParseError"}, {"message", e.what()}}}};
    }
    res.set_content(response.dump(), "application/json");
  });
  return server.listen("0.0.0.0", port) ? 0 : 1;
}

}  // namespace sapo
