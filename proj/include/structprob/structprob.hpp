// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "structprob/classical.hpp"
#include "structprob/event.hpp"
#include "structprob/stats.hpp"
#include "structprob/theorems.hpp"
#include "structprob/twoslit.hpp"
