import json
import sys


def firework_step_redesign(v_k, g_k, fn, base_step):
    """
    params:
    v_k: current placement
    g_k: current placement's gradient
    fn: evaluation tool for a solution
    base_step: the optimizer's BB estimate for this iteration
    """
    return base_step


def main():
    for line in sys.stdin:
        request = json.loads(line)

        def fn(x):
            sys.stdout.write(json.dumps({"eval": list(x)}) + "\n")
            sys.stdout.flush()
            reply = json.loads(sys.stdin.readline())
            return reply["value"]

        step = firework_step_redesign(
            request["v"], request["g"], fn, request["base_step"]
        )
        sys.stdout.write(json.dumps({"step": step}) + "\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
