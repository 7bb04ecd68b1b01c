"""Area minimizing double bubbles in flat three-tori."""
