from lab.run_lab import main

if __name__ == "__main__":
    raise SystemExit(main())
