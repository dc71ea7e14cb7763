#pragma once

#include "diqpq/errors.hpp"
#include "diqpq/rng.hpp"
#include "diqpq/qmath.hpp"
#include "diqpq/bases_povm.hpp"
#include "diqpq/chsh.hpp"
#include "diqpq/transcript.hpp"
#include "diqpq/protocol.hpp"
#include "diqpq/bounds.hpp"
#include "diqpq/adversary.hpp"
#include "diqpq/commands.hpp"
