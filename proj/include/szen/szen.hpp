#ifndef SZEN_SZEN_HPP_
#define SZEN_SZEN_HPP_

#include "szen/logic.hpp"
#include "szen/tptp.hpp"
#include "szen/compiler.hpp"
#include "szen/tableau.hpp"
#include "szen/render.hpp"
#include "szen/cli.hpp"

#endif  // SZEN_SZEN_HPP_
